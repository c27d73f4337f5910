"""Exact references: dense thermal diagonalization, exhaustive classical
enumeration, and ground-state enumeration of the honeycomb lattice by
row-transfer dynamic programming.

All three are independent of the Monte Carlo path and serve as the oracles
the stochastic estimates are tested against.  Energies are in units of J
with the Hamiltonian

    H = sum_<ij> J_ij sigma^z_i sigma^z_j + g sum_i sigma^x_i
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice
from .observables import PHASE_M, PHASE_PSI, A_NORM

__all__ = [
    "SpinGraph",
    "CapacityError",
    "EDResult",
    "ClassicalResult",
    "GroundStateReport",
    "exact_thermal",
    "classical_enumerate",
    "ground_states_dp",
    "ring_graph",
    "ladder_graph",
    "random_spin_graph",
    "double_hexagon_graph",
]

ED_MAX_SITES = 12
ENUM_MAX_SITES = 24
DP_MAX_WIDTH = 16


class CapacityError(ValueError):
    """Problem size exceeds what the exact method can handle."""


@dataclass
class SpinGraph:
    """A small spin system: sites, signed couplings, transverse field.

    `sublab` / `unit_bonds` / `unit_sites` carry the six-sublattice and
    hexagon-unit annotations when the graph supports order parameters.
    """

    n: int
    bonds: list[tuple[int, int, float]]
    g: float = 0.0
    sublab: np.ndarray | None = None
    unit_sites: np.ndarray | None = None
    unit_bonds: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one site")
        seen = set()
        for i, j, _ in self.bonds:
            if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
                raise ValueError(f"bad bond endpoints ({i}, {j})")
            if (min(i, j), max(i, j)) in seen:
                raise ValueError(f"duplicate bond ({i}, {j})")
            seen.add((min(i, j), max(i, j)))

    # -- engine-facing views -------------------------------------------------
    @property
    def nn(self) -> int:
        return self.n

    @property
    def nb(self) -> int:
        return len(self.bonds)

    @property
    def bond_i(self) -> np.ndarray:
        return np.array([b[0] for b in self.bonds], np.int32)

    @property
    def bond_j(self) -> np.ndarray:
        return np.array([b[1] for b in self.bonds], np.int32)

    @property
    def bond_sign(self) -> np.ndarray:
        return np.array([1 if b[2] > 0 else -1 for b in self.bonds], np.int8)

    @property
    def bond_J(self) -> np.ndarray:
        return np.array([b[2] for b in self.bonds], np.float64)

    @property
    def sum_abs_J(self) -> float:
        return float(np.abs(self.bond_J).sum())

    @property
    def has_units(self) -> bool:
        return self.unit_bonds is not None and self.sublab is not None

    @classmethod
    def from_lattice(cls, lat: Lattice, g: float = 0.0) -> "SpinGraph":
        bonds = [
            (int(lat.bond_i[b]), int(lat.bond_j[b]), float(lat.bond_sign[b]))
            for b in range(lat.nb)
        ]
        sub = lat.sublab.copy() if lat.has_units else None
        return cls(
            n=lat.nn, bonds=bonds, g=g, sublab=sub,
            unit_sites=lat.unit_sites.copy() if lat.has_units else None,
            unit_bonds=lat.unit_bonds.copy() if lat.has_units else None,
        )

    @classmethod
    def from_json(cls, text: str) -> "SpinGraph":
        doc = json.loads(text)
        kwargs = {}
        if "sublattices" in doc:
            kwargs["sublab"] = np.array(doc["sublattices"], np.int8)
        if "unit_sites" in doc:
            kwargs["unit_sites"] = np.array(doc["unit_sites"], np.int32)
        if "unit_bonds" in doc:
            kwargs["unit_bonds"] = np.array(doc["unit_bonds"], np.int32)
        return cls(
            n=doc["n"],
            bonds=[(int(i), int(j), float(J)) for i, j, J in doc["bonds"]],
            g=float(doc.get("g", 0.0)),
            **kwargs,
        )

    def to_json(self) -> str:
        doc = {"n": self.n, "g": self.g, "bonds": [[i, j, J] for i, j, J in self.bonds]}
        if self.sublab is not None:
            doc["sublattices"] = self.sublab.tolist()
        if self.unit_sites is not None:
            doc["unit_sites"] = self.unit_sites.tolist()
        if self.unit_bonds is not None:
            doc["unit_bonds"] = self.unit_bonds.tolist()
        return json.dumps(doc)


# ---------------------------------------------------------------------------
# state-vector helpers: basis state s encodes sigma_i = 2*bit_i(s) - 1
# ---------------------------------------------------------------------------

def _classical_energies(graph: SpinGraph, states: np.ndarray) -> np.ndarray:
    e = np.zeros(len(states), np.float64)
    for i, j, J in graph.bonds:
        anti = ((states >> np.uint64(i)) ^ (states >> np.uint64(j))) & np.uint64(1)
        e += J * (1.0 - 2.0 * anti.astype(np.float64))
    return e


def _order_parameter_values(graph: SpinGraph, states: np.ndarray):
    """Per-basis-state complex m_H and psi_H for an annotated graph."""
    if not graph.has_units:
        raise ValueError("graph carries no sublattice/unit annotations")
    nn = graph.n
    m = np.zeros(len(states), np.complex128)
    for s in range(1, 7):
        mask = np.uint64(0)
        for i in np.nonzero(graph.sublab == s)[0]:
            mask |= np.uint64(1) << np.uint64(i)
        count = np.bitwise_count(states & mask).astype(np.float64)
        n_s = int(np.bitwise_count(mask))
        m += PHASE_M[s - 1] * (2.0 * count - n_s)
    m *= 6.0 / (nn * A_NORM)
    bi, bj, bJ = graph.bond_i, graph.bond_j, graph.bond_J
    psi = np.zeros(len(states), np.complex128)
    for unit in graph.unit_bonds:
        for k in range(6):
            b = int(unit[k])
            anti = ((states >> np.uint64(int(bi[b]))) ^ (states >> np.uint64(int(bj[b])))) & np.uint64(1)
            sisj = 1.0 - 2.0 * anti.astype(np.float64)
            frus = (bJ[b] * sisj) > 0
            psi += PHASE_PSI[k] * frus
    psi /= nn
    return m, psi


@dataclass
class EDResult:
    energy_density: float
    obs: dict[str, float] = field(default_factory=dict)


def exact_thermal(graph: SpinGraph, beta: float, order_params: bool = False) -> EDResult:
    """Thermal averages from a dense 2^n spectral decomposition (n <= 12)."""
    if graph.n > ED_MAX_SITES:
        raise CapacityError(f"exact_thermal handles n <= {ED_MAX_SITES}, got {graph.n}")
    if beta <= 0:
        raise ValueError("beta must be positive")
    dim = 1 << graph.n
    states = np.arange(dim, dtype=np.uint64)
    diag = _classical_energies(graph, states)
    H = np.zeros((dim, dim), np.float64)
    H[np.arange(dim), np.arange(dim)] = diag
    if graph.g != 0.0:
        for i in range(graph.n):
            flipped = states ^ (np.uint64(1) << np.uint64(i))
            H[flipped.astype(np.int64), np.arange(dim)] += graph.g
    w, V = np.linalg.eigh(H)
    logw = -beta * (w - w[0])
    bw = np.exp(logw)
    Z = bw.sum()
    e = float((bw * w).sum() / Z / graph.n)
    obs = {}
    if order_params:
        rho = (V * V) @ (bw / Z)  # diagonal of the thermal density matrix
        m, psi = _order_parameter_values(graph, states)
        obs["abs_mH"] = float(np.abs(m) @ rho)
        obs["abs_psiH"] = float(np.abs(psi) @ rho)
    return EDResult(energy_density=e, obs=obs)


@dataclass
class GroundStateReport:
    total_energy: float
    energy_per_site: float
    degeneracy: int
    configs: np.ndarray  # (n_reps, n) int8, +-1; full manifold when <= cap
    complete: bool
    m_values: np.ndarray | None = None  # complex, per rep
    psi_values: np.ndarray | None = None
    uniform_mask: np.ndarray | None = None  # reps whose units share one frustration pattern
    uniform_positions: np.ndarray | None = None  # shared edge position (1..6) or 0

    def to_json(self) -> str:
        doc = {
            "total_energy": self.total_energy,
            "energy_per_site": self.energy_per_site,
            "degeneracy": self.degeneracy,
            "complete": self.complete,
            "configs": ["".join("+" if s > 0 else "-" for s in c) for c in self.configs],
        }
        if self.m_values is not None:
            doc["m_values"] = [[z.real, z.imag] for z in self.m_values]
            doc["psi_values"] = [[z.real, z.imag] for z in self.psi_values]
            doc["uniform_mask"] = self.uniform_mask.astype(int).tolist()
            doc["uniform_positions"] = self.uniform_positions.astype(int).tolist()
        return json.dumps(doc, indent=1)


def _annotate_report(graph: SpinGraph, report: GroundStateReport) -> None:
    if not graph.has_units or len(report.configs) == 0:
        return
    states = np.zeros(len(report.configs), np.uint64)
    for i in range(graph.n):
        states |= ((report.configs[:, i] > 0).astype(np.uint64)) << np.uint64(i)
    m, psi = _order_parameter_values(graph, states)
    report.m_values = m
    report.psi_values = psi
    bi, bj, bJ = graph.bond_i, graph.bond_j, graph.bond_J
    n_reps = len(report.configs)
    mask = np.zeros(n_reps, bool)
    pos = np.zeros(n_reps, np.int8)
    for r in range(n_reps):
        spins = report.configs[r]
        unit_pats = set()
        for unit in graph.unit_bonds:
            pat = tuple(
                k + 1
                for k in range(6)
                if bJ[unit[k]] * spins[bi[unit[k]]] * spins[bj[unit[k]]] > 0
            )
            unit_pats.add(pat)
            if len(unit_pats) > 1:
                break
        if len(unit_pats) == 1:
            mask[r] = True
            pat = unit_pats.pop()
            pos[r] = pat[0] if len(pat) == 1 else 0
    report.uniform_mask = mask
    report.uniform_positions = pos


@dataclass
class ClassicalResult:
    energy_density: float
    abs_mH: float | None
    abs_psiH: float | None
    report: GroundStateReport


def classical_enumerate(graph: SpinGraph, beta: float, cap: int = 4096) -> ClassicalResult:
    """Exact g=0 Boltzmann averages and ground manifold by 2^n scan (n <= 24)."""
    if graph.n > ENUM_MAX_SITES:
        raise CapacityError(f"classical_enumerate handles n <= {ENUM_MAX_SITES}, got {graph.n}")
    if beta <= 0:
        raise ValueError("beta must be positive")
    dim = 1 << graph.n
    states = np.arange(dim, dtype=np.uint64)
    e = _classical_energies(graph, states)
    e_min = e.min()
    bw = np.exp(-beta * (e - e_min))
    Z = bw.sum()
    e_mean = float((bw * e).sum() / Z / graph.n)
    abs_m = abs_psi = None
    if graph.has_units:
        m, psi = _order_parameter_values(graph, states)
        abs_m = float((bw * np.abs(m)).sum() / Z)
        abs_psi = float((bw * np.abs(psi)).sum() / Z)
    ground_idx = np.nonzero(e == e_min)[0]
    degeneracy = len(ground_idx)
    reps_idx = ground_idx if degeneracy <= cap else ground_idx[:: max(1, degeneracy // cap)][:cap]
    bits = ((states[reps_idx][:, None] >> np.arange(graph.n, dtype=np.uint64)[None, :])
            & np.uint64(1)).astype(np.int8)
    configs = 2 * bits - 1
    report = GroundStateReport(
        total_energy=float(e_min),
        energy_per_site=float(e_min) / graph.n,
        degeneracy=int(degeneracy),
        configs=configs,
        complete=degeneracy <= cap,
    )
    _annotate_report(graph, report)
    return ClassicalResult(e_mean, abs_m, abs_psi, report)


# ---------------------------------------------------------------------------
# row-transfer dynamic programming over the honeycomb torus
# ---------------------------------------------------------------------------

def _row_tables(lat: Lattice):
    """Per-row interaction tables for the transfer DP.

    Row d holds the 2*nx sites of cell row d, encoded with the A spin of
    column c at bit c and the B spin at bit nx + c.  Cross-row bonds always
    join a B site of row d-1 to an A site of row d, so the inter-row energy
    only couples the B half of one row to the A half of the next.
    """
    nx, ny = lat.nx, lat.ny
    nA = 1 << nx
    n_state = 1 << (2 * nx)
    states = np.arange(n_state, dtype=np.int64)
    sA = [(2.0 * ((states >> c) & 1) - 1.0) for c in range(nx)]
    sB = [(2.0 * ((states >> (nx + c)) & 1) - 1.0) for c in range(nx)]
    half = np.arange(nA, dtype=np.int64)
    hbit = [(2.0 * ((half >> c) & 1) - 1.0) for c in range(nx)]

    intra = [np.zeros(n_state, np.float64) for _ in range(ny)]
    inter = [np.zeros((nA, nA), np.float64) for _ in range(ny)]  # [B_prev, A_next]
    for b in range(lat.nb):
        i, j = int(lat.bond_i[b]), int(lat.bond_j[b])
        J = float(lat.bond_sign[b])
        di, dj = int(lat.site_d[i]), int(lat.site_d[j])
        if di == dj:
            si = sA[lat.site_c[i]] if lat.site_sub[i] == 0 else sB[lat.site_c[i]]
            sj = sA[lat.site_c[j]] if lat.site_sub[j] == 0 else sB[lat.site_c[j]]
            intra[di] += J * si * sj
        else:
            # orient as (B site in row d_next - 1, A site in row d_next)
            if lat.site_sub[i] == 0:
                a_site, b_site = i, j
            else:
                a_site, b_site = j, i
            assert lat.site_sub[a_site] == 0 and lat.site_sub[b_site] == 1
            d_next = int(lat.site_d[a_site])
            assert (int(lat.site_d[b_site]) + 1) % lat.ny == d_next
            inter[d_next] += J * np.outer(hbit[lat.site_c[b_site]], hbit[lat.site_c[a_site]])
    return intra, inter


def ground_states_dp(lat: Lattice, cap: int = 4096) -> GroundStateReport:
    """Exact classical ground energy, degeneracy and configurations.

    Dynamic programming over rows of width 2*(lx+1) spins with periodic
    closure in both directions, conditioning on the first row.  Exact for
    widths up to 16 spins (the 36-site lattice has width 12).
    """
    width = 2 * lat.nx
    if width > DP_MAX_WIDTH:
        raise CapacityError(f"row width {width} exceeds DP limit {DP_MAX_WIDTH}")
    nx, ny = lat.nx, lat.ny
    nA = 1 << nx
    n_state = 1 << width
    intra, inter = _row_tables(lat)
    states = np.arange(n_state, dtype=np.int64)
    a_of = (states & (nA - 1)).astype(np.int64)
    b_of = (states >> nx).astype(np.int64)

    # pass 1: vectorized over all anchors -> E_min and exact degeneracy
    INF = 1e18
    V = np.full((n_state, n_state), INF)
    V[np.arange(n_state), np.arange(n_state)] = intra[0]
    C = np.zeros((n_state, n_state), np.int64)
    C[np.arange(n_state), np.arange(n_state)] = 1
    for d in range(1, ny):
        Vr = V.reshape(n_state, nA, nA)  # [anchor, B, A]
        Cr = C.reshape(n_state, nA, nA)
        w = Vr.min(axis=2)  # min over the A half, which is interior
        cw = (Cr * (Vr == w[:, :, None])).sum(axis=2)
        cand = w[:, :, None] + inter[d][None, :, :]  # [anchor, B_prev, A_next]
        g = cand.min(axis=1)
        cg = (cw[:, :, None] * (cand == g[:, None, :])).sum(axis=1)
        # broadcast over the new row's B half, then add its intra energy
        V = np.broadcast_to(g[:, None, :], (n_state, nA, nA)).reshape(n_state, n_state) + intra[d][None, :]
        C = np.broadcast_to(cg[:, None, :], (n_state, nA, nA)).reshape(n_state, n_state).copy()
    # periodic closure back onto the anchor row
    Vr = V.reshape(n_state, nA, nA)
    Cr = C.reshape(n_state, nA, nA)
    w = Vr.min(axis=2)
    cw = (Cr * (Vr == w[:, :, None])).sum(axis=2)
    closeT = inter[0].T  # [A_anchor, B_last]
    tot = w + closeT[a_of, :]  # [anchor, B_last]
    ctot = cw
    E_anchor = tot.min(axis=1)
    C_anchor = (ctot * (tot == E_anchor[:, None])).sum(axis=1)
    E_min = float(E_anchor.min())
    at = E_anchor == E_min
    degeneracy = int(C_anchor[at].sum())

    # pass 2: enumerate ground configurations by per-anchor backtracking
    configs = []
    for anchor in np.nonzero(at)[0]:
        if len(configs) >= cap:
            break
        back = [None] * ny  # back[d][s] = best completion of rows d+1.. + closure
        back[ny - 1] = closeT[a_of[anchor], b_of]
        for d in range(ny - 1, 0, -1):
            # row-d state = (B << nx) | A: reshape [B, A], min over the B half
            nxt = back[d] + intra[d]
            u_by_a = nxt.reshape(nA, nA).min(axis=0)
            back[d - 1] = (inter[d] + u_by_a[None, :]).min(axis=1)[b_of]
        stack = [(0, [int(anchor)], float(intra[0][anchor]))]
        while stack:
            d, rows, acc = stack.pop()
            if len(configs) >= cap:
                break
            if d == ny - 1:
                spins = np.empty(lat.nn, np.int8)
                for dd in range(ny):
                    s = rows[dd]
                    for c in range(nx):
                        a_id = 2 * (dd * nx + c)
                        spins[a_id] = 1 if (s >> c) & 1 else -1
                        spins[a_id + 1] = 1 if (s >> (nx + c)) & 1 else -1
                configs.append(spins)
                continue
            prev = rows[-1]
            cont = acc + inter[d + 1][b_of[prev], a_of] + intra[d + 1] + back[d + 1]
            for s in np.nonzero(np.abs(cont - E_min) < 1e-9)[0]:
                stack.append((d + 1, rows + [int(s)],
                              acc + float(inter[d + 1][b_of[prev], s & (nA - 1)]) + float(intra[d + 1][s])))

    report = GroundStateReport(
        total_energy=E_min,
        energy_per_site=E_min / lat.nn,
        degeneracy=degeneracy,
        configs=np.array(configs, np.int8) if configs else np.zeros((0, lat.nn), np.int8),
        complete=degeneracy <= cap and len(configs) == degeneracy,
    )
    _annotate_report(SpinGraph.from_lattice(lat), report)
    return report


# ---------------------------------------------------------------------------
# toy graphs
# ---------------------------------------------------------------------------

def ring_graph(n: int = 6, n_af: int = 1, g: float = 0.0, annotated: bool = False) -> SpinGraph:
    """Periodic chain with the first `n_af` bonds antiferromagnetic.

    With n = 6, n_af = 1 and `annotated`, the ring doubles as a single
    hexagon unit: labels run 1..6 around it with the AF bond at edge
    position 6 (between sites 6 and 1), matching the lattice convention.
    """
    bonds = [(i, (i + 1) % n, 1.0 if i < n_af else -1.0) for i in range(n)]
    kwargs = {}
    if annotated:
        if n != 6 or n_af != 1:
            raise ValueError("annotation supported for the 6-ring with one AF bond")
        # AF bond joins ring sites 0 and 1 -> labels 6 and 1
        kwargs["sublab"] = np.array([6, 1, 2, 3, 4, 5], np.int8)
        kwargs["unit_sites"] = np.array([[1, 2, 3, 4, 5, 0]], np.int32)
        kwargs["unit_bonds"] = np.array([[1, 2, 3, 4, 5, 0]], np.int32)
    return SpinGraph(n=n, bonds=bonds, g=g, **kwargs)


def ladder_graph(length: int = 4, g: float = 0.0) -> SpinGraph:
    """Periodic two-leg ladder, one AF rail bond per square plaquette."""
    bonds = []
    for i in range(length):
        bonds.append((i, (i + 1) % length, 1.0))  # top rail, AF
        bonds.append((length + i, length + (i + 1) % length, -1.0))  # bottom rail
        bonds.append((i, length + i, -1.0))  # rung
    return SpinGraph(n=2 * length, bonds=bonds, g=g)


def random_spin_graph(n: int = 10, n_bonds: int = 15, seed: int = 7, g: float = 0.0) -> SpinGraph:
    """Connected random graph with J = +-1 couplings (deterministic in seed)."""
    rng = np.random.default_rng(seed)
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):  # random spanning tree first
        a = int(order[k])
        b = int(order[rng.integers(0, k)])
        edges.add((min(a, b), max(a, b)))
    while len(edges) < n_bonds:
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        if a != b:
            edges.add((min(a, b), max(a, b)))
    bonds = [(i, j, float(rng.choice([-1.0, 1.0]))) for i, j in sorted(edges)]
    return SpinGraph(n=n, bonds=bonds, g=g)


def double_hexagon_graph(g: float = 0.0) -> SpinGraph:
    """Two disjoint annotated hexagon units bridged by two ferro bonds.

    Twelve sites, each sublattice label appearing twice; the bridges are not
    unit edges (they only make the graph connected).
    """
    bonds = []
    for h in range(2):
        o = 6 * h
        bonds += [(o + i, o + (i + 1) % 6, 1.0 if i == 0 else -1.0) for i in range(6)]
    bonds.append((2, 8, -1.0))
    bonds.append((5, 11, -1.0))
    sublab = np.array([6, 1, 2, 3, 4, 5] * 2, np.int8)
    unit_sites = np.array([[1, 2, 3, 4, 5, 0], [7, 8, 9, 10, 11, 6]], np.int32)
    unit_bonds = np.array([[1, 2, 3, 4, 5, 0], [7, 8, 9, 10, 11, 6]], np.int32)
    return SpinGraph(n=12, bonds=bonds, g=g, sublab=sublab,
                     unit_sites=unit_sites, unit_bonds=unit_bonds)
