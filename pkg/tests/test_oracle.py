import json
import math

import numpy as np
import pytest

from hexsse.lattice import build_lattice
from hexsse.oracle import (
    CapacityError,
    SpinGraph,
    classical_enumerate,
    double_hexagon_graph,
    exact_thermal,
    ground_states_dp,
    ladder_graph,
    random_spin_graph,
    ring_graph,
)

from conftest import random_spins


def test_single_site_closed_form():
    g = SpinGraph(n=1, bonds=[], g=1.0)
    res = exact_thermal(g, 2.0)
    assert res.energy_density == pytest.approx(-math.tanh(2.0), abs=1e-12)
    assert res.energy_density == pytest.approx(-0.9640275800758169, abs=1e-12)


def test_two_site_af_bond_closed_form():
    g = SpinGraph(n=2, bonds=[(0, 1, 1.0)], g=0.0)
    res = exact_thermal(g, 3.3)
    assert res.energy_density == pytest.approx(-0.5 * math.tanh(3.3), abs=1e-12)


def test_ed_capacity_error():
    g = SpinGraph(n=13, bonds=[(i, i + 1, 1.0) for i in range(12)], g=0.1)
    with pytest.raises(CapacityError):
        exact_thermal(g, 1.0)


def test_enumerate_capacity_error():
    g = SpinGraph(n=25, bonds=[(i, i + 1, 1.0) for i in range(24)])
    with pytest.raises(CapacityError):
        classical_enumerate(g, 1.0)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_ed_matches_enumeration_at_zero_field(seed):
    g = random_spin_graph(n=9, n_bonds=13, seed=seed)
    for beta in (0.7, 3.3):
        e_ed = exact_thermal(g, beta).energy_density
        e_cl = classical_enumerate(g, beta).energy_density
        assert e_ed == pytest.approx(e_cl, abs=1e-10)


def test_af_triangle_has_six_ground_states():
    tri = SpinGraph(n=3, bonds=[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    rep = classical_enumerate(tri, 1.0).report
    assert rep.degeneracy == 6
    assert rep.total_energy == -1.0


def test_ferro_ring_ground_state():
    ring = SpinGraph(n=6, bonds=[(i, (i + 1) % 6, -1.0) for i in range(6)])
    rep = classical_enumerate(ring, 1.0).report
    assert rep.degeneracy == 2
    assert rep.total_energy == -6.0


def test_enumeration_ground_matches_cold_ed():
    g = random_spin_graph(n=12, n_bonds=18, seed=8)
    rep = classical_enumerate(g, 1.0).report
    e_cold = exact_thermal(g, 50.0).energy_density
    assert e_cold == pytest.approx(rep.energy_per_site, abs=1e-8)


def test_annotated_ring_thermal_order_parameters():
    r6 = ring_graph(6, 1, annotated=True)
    res = classical_enumerate(r6, 3.3)
    # 12 single-frustrated-edge ground states; each has |psi| = 1/6 exactly
    assert res.report.degeneracy == 12
    assert np.allclose(np.abs(res.report.psi_values), 1 / 6)
    assert res.abs_psiH == pytest.approx(1 / 6, abs=2e-3)  # small thermal correction
    ed = exact_thermal(SpinGraph(n=6, bonds=r6.bonds, g=0.0, sublab=r6.sublab,
                                 unit_sites=r6.unit_sites, unit_bonds=r6.unit_bonds),
                       3.3, order_params=True)
    assert ed.obs["abs_mH"] == pytest.approx(res.abs_mH, abs=1e-10)
    assert ed.obs["abs_psiH"] == pytest.approx(res.abs_psiH, abs=1e-10)


def test_spin_graph_validation_and_json_roundtrip():
    with pytest.raises(ValueError, match="duplicate"):
        SpinGraph(n=3, bonds=[(0, 1, 1.0), (1, 0, -1.0)])
    with pytest.raises(ValueError, match="endpoints"):
        SpinGraph(n=3, bonds=[(0, 3, 1.0)])
    g = double_hexagon_graph(g=0.4)
    g2 = SpinGraph.from_json(g.to_json())
    assert g2.n == g.n and g2.bonds == g.bonds and g2.g == g.g
    assert np.array_equal(g2.sublab, g.sublab)
    assert np.array_equal(g2.unit_bonds, g.unit_bonds)


# ---------------------------------------------------------------------------
# ground-state DP
# ---------------------------------------------------------------------------

def test_dp_capacity_error():
    lat = build_lattice(11, 5)  # row width 24 > 16
    with pytest.raises(CapacityError):
        ground_states_dp(lat)


@pytest.mark.parametrize("lx,ly", [(1, 1), (2, 2)])
def test_dp_matches_enumeration_on_small_ferro_tori(lx, ly):
    lat = build_lattice(lx, ly, "ferro")
    rep = ground_states_dp(lat)
    ref = classical_enumerate(SpinGraph.from_lattice(lat), 1.0).report
    assert rep.total_energy == ref.total_energy
    assert rep.degeneracy == ref.degeneracy == 2
    assert rep.energy_per_site == pytest.approx(-1.5)


def test_dp_ground_manifold_l1(lat_l1):
    """Frozen golden values, independently derived by exhaustive enumeration
    of realizable dual perfect matchings (tools/find_default_pattern.py)."""
    rep = ground_states_dp(lat_l1)
    assert rep.total_energy == -36.0
    assert rep.energy_per_site == -1.0
    assert rep.degeneracy == 2240
    assert rep.complete
    assert len(rep.configs) == 2240
    # every representative attains the reported energy
    g = SpinGraph.from_lattice(lat_l1)
    for spins in rep.configs[::97]:
        e = sum(J * spins[i] * spins[j] for i, j, J in g.bonds)
        assert e == rep.total_energy
    # each ground configuration has exactly one frustrated bond per plaquette
    signs = lat_l1.bond_sign
    for spins in rep.configs[::97]:
        frus = (signs * spins[lat_l1.bond_i] * spins[lat_l1.bond_j]) > 0
        assert np.all(frus[lat_l1.plaq_bonds].sum(axis=1) == 1)


def test_dp_manifold_flip_symmetry(lat_l1):
    rep = ground_states_dp(lat_l1)
    keys = {tuple(c) for c in rep.configs.tolist()}
    assert all(tuple(-s for s in k) in keys for k in keys)
    m_round = sorted(np.round(rep.m_values, 9).tolist(), key=lambda z: (z.real, z.imag))
    m_neg = sorted(np.round(-rep.m_values, 9).tolist(), key=lambda z: (z.real, z.imag))
    assert m_round == m_neg  # m values come in +- pairs
    psi = np.round(rep.psi_values, 9)
    vals, counts = np.unique(psi, return_counts=True)
    assert np.all(counts % 2 == 0)  # psi values come in equal pairs


def test_dp_uniform_subset_structure(lat_l1):
    rep = ground_states_dp(lat_l1)
    um = rep.uniform_mask
    assert int(um.sum()) == 6
    mods = np.abs(rep.m_values[um])
    assert np.allclose(mods, mods[0], atol=1e-9)
    psis = rep.psi_values[um]
    assert np.allclose(np.abs(psis), 1 / 6, atol=1e-9)
    assert len(set(np.round(psis, 9))) == 3
    assert set(rep.uniform_positions[um]) <= set(range(1, 7))


def test_dp_report_json(lat_l1):
    rep = ground_states_dp(lat_l1, cap=16)
    doc = json.loads(rep.to_json())
    assert doc["degeneracy"] == 2240
    assert not doc["complete"]
    assert all(set(c) <= {"+", "-"} and len(c) == 36 for c in doc["configs"])


def test_ladder_ground_energy_is_matching_bound():
    lad = ladder_graph(4)
    rep = classical_enumerate(lad, 1.0).report
    # 4 squares, one frustrated bond shared by two squares each: E = -12 + 2*2
    assert rep.total_energy == -8.0
