"""The SSE Markov chain: state, sweeps, cutoff adjustment and run orchestration.

One configuration is (|alpha_0>, C_L): a spin array and a fixed-length
operator string sampled with the weight of its matrix-element product.  A
Monte Carlo sweep is a diagonal update (Metropolis insertion/removal of
constant and Ising operators), linked-vertex construction, and a cluster
update that flips leg clusters with probability 1/2 while exchanging
constant and field operators on cluster boundaries.

The chain works on any spin graph with |J| = 1 couplings (the honeycomb
Lattice or a toy SpinGraph); order parameters are measured when the graph
carries sublattice/unit annotations.
"""
from __future__ import annotations

import math
import time

import numpy as np

from . import _rng
from ._backend import BACKEND, get_kernels
from .observables import (
    A_NORM,
    PHASE_M,
    PHASE_PSI,
    MeasurementAccumulator,
    RunResult,
    slice_measure,
)

__all__ = ["SseState", "init_state", "run_simulation", "insertion_acceptance",
           "removal_acceptance", "load_spin_file"]

INITIAL_CUTOFF = 20


def insertion_acceptance(beta: float, c_total: float, slots_free: int) -> float:
    """Metropolis acceptance for inserting a diagonal operator."""
    if slots_free <= 0:
        return 1.0
    return min(1.0, beta * c_total / slots_free)


def removal_acceptance(beta: float, c_total: float, slots_free_after: int) -> float:
    """Metropolis acceptance for removing a diagonal operator."""
    return min(1.0, slots_free_after / (beta * c_total))


def load_spin_file(path: str, nn: int) -> np.ndarray:
    """Read a +-1 spin configuration, one whitespace-separated value per site."""
    try:
        values = np.loadtxt(path, dtype=np.int64).ravel()
    except OSError:
        raise
    except Exception as exc:
        raise ValueError(f"unreadable spin file {path}: {exc}") from exc
    if len(values) != nn:
        raise ValueError(f"spin file {path} has {len(values)} entries, lattice has {nn} sites")
    if not np.all(np.isin(values, (-1, 1))):
        raise ValueError(f"spin file {path} contains entries outside {{-1, +1}}")
    return values.astype(np.int8)


class SseState:
    """Markov-chain configuration plus scratch buffers for the sweep kernels."""

    def __init__(self, graph, beta: float, g: float, seed: int = 1, stream: int = 0,
                 spins: np.ndarray | None = None, backend: str | None = None):
        if beta <= 0:
            raise ValueError("beta must be positive")
        if g < 0:
            raise ValueError("g must be non-negative")
        signs = np.asarray(graph.bond_sign, np.int8)
        if hasattr(graph, "bond_J") and not np.allclose(np.abs(graph.bond_J), 1.0):
            raise ValueError("the SSE chain requires |J| = 1 on every bond")
        self.graph = graph
        self.beta = float(beta)
        self.g = float(g)
        self.nn = int(graph.nn)
        self.nb = int(graph.nb)
        self.bond_i = np.ascontiguousarray(graph.bond_i, np.int32)
        self.bond_j = np.ascontiguousarray(graph.bond_j, np.int32)
        self.bond_sign = np.ascontiguousarray(signs)
        self.C = self.g * self.nn + 2.0 * self.nb
        if self.C <= 0:
            raise ValueError("g = 0 with no bonds leaves nothing to sample")
        self.p_const = self.g * self.nn / self.C
        self.rng = _rng.seed_state(seed, stream)
        self.kern = get_kernels(backend)
        self.backend = self.kern.BACKEND_NAME

        if spins is None:
            spins = np.empty(self.nn, np.int8)
            for s in range(self.nn):
                spins[s] = 1 if _rng.next_double(self.rng) < 0.5 else -1
        else:
            spins = np.asarray(spins, np.int8).copy()
            if len(spins) != self.nn:
                raise ValueError("initial spin array has wrong length")
        self.spins = spins
        self.op = np.zeros(INITIAL_CUTOFF, np.int32)
        self.n_h = 0
        self.saturation_count = 0
        # cutoff padding applies to the honeycomb geometry only
        if hasattr(graph, "lx"):
            self.cutoff_pad = (graph.lx * graph.ly) ** 2 / 100.0
        else:
            self.cutoff_pad = 0.0
        self._scratch = np.empty(self.nn, np.int8)
        self._alloc_leg_buffers()
        self._measure_tables = None

    # ------------------------------------------------------------------ state
    @property
    def L(self) -> int:
        return len(self.op)

    def _alloc_leg_buffers(self):
        nlegs = 4 * self.L
        self.link = np.empty(nlegs, np.int64)
        self.legspin = np.empty(nlegs, np.int8)
        self.first = np.empty(self.nn, np.int64)
        self.last = np.empty(self.nn, np.int64)
        self._stack = np.empty(max(nlegs, 1), np.int64)
        self._visited = np.empty(max(nlegs, 1), np.uint8)

    # ---------------------------------------------------------------- updates
    def diagonal_update(self) -> None:
        np.copyto(self._scratch, self.spins)
        self.n_h, sat = self.kern.diagonal_sweep(
            self.op, self._scratch, self.bond_i, self.bond_j, self.bond_sign,
            self.rng, self.n_h, self.beta * self.C, self.p_const, self.nn, self.nb,
        )
        self.saturation_count += int(sat)

    def build_links(self) -> None:
        np.copyto(self._scratch, self.spins)
        self.kern.build_links(
            self.op, self.bond_i, self.bond_j, self._scratch,
            self.link, self.legspin, self.first, self.last,
        )

    def cluster_update(self) -> None:
        self.kern.cluster_sweep(
            self.op, self.link, self.legspin, self.first, self.last,
            self.spins, self._stack, self._visited, self.rng,
        )

    def adjust_cutoff(self) -> bool:
        l_new = math.ceil(self.n_h * 10.0 / 9.0 + self.cutoff_pad)
        if l_new <= self.L:
            return False
        grown = np.zeros(l_new, np.int32)
        grown[: self.L] = self.op
        self.op = grown
        self._alloc_leg_buffers()
        return True

    def mc_sweep(self, adjust: bool = False) -> None:
        self.diagonal_update()
        self.build_links()
        self.cluster_update()
        if adjust:
            self.adjust_cutoff()

    # ------------------------------------------------------------ measurement
    def _build_measure_tables(self):
        g = self.graph
        sublab0 = np.ascontiguousarray(np.asarray(g.sublab, np.int64) - 1, np.int8)
        unit_bonds = np.asarray(g.unit_bonds)
        n_edges = unit_bonds.size
        edge_i = np.empty(n_edges, np.int32)
        edge_j = np.empty(n_edges, np.int32)
        edge_sign = np.empty(n_edges, np.int8)
        edge_pos0 = np.empty(n_edges, np.int8)
        site_edges = np.full(self.nn * 3, -1, np.int32)
        fill = np.zeros(self.nn, np.int64)
        e = 0
        for u in range(unit_bonds.shape[0]):
            for k in range(6):
                b = int(unit_bonds[u, k])
                edge_i[e] = self.bond_i[b]
                edge_j[e] = self.bond_j[b]
                edge_sign[e] = self.bond_sign[b]
                edge_pos0[e] = k
                for s in (int(edge_i[e]), int(edge_j[e])):
                    site_edges[3 * s + fill[s]] = e
                    fill[s] += 1
                e += 1
        self._measure_tables = dict(
            sublab0=sublab0, site_edges=site_edges,
            edge_i=edge_i, edge_j=edge_j, edge_sign=edge_sign, edge_pos0=edge_pos0,
            edge_frus=np.zeros(n_edges, np.int8),
            pm_re=np.ascontiguousarray(PHASE_M.real), pm_im=np.ascontiguousarray(PHASE_M.imag),
            pp_re=np.ascontiguousarray(PHASE_PSI.real), pp_im=np.ascontiguousarray(PHASE_PSI.imag),
            sub_sums=np.zeros(6, np.int64), frus_counts=np.zeros(6, np.int64),
            slicesum_sub=np.zeros(6, np.int64), slicesum_frus=np.zeros(6, np.int64),
        )

    def measure_sweep(self):
        """Slice averages for the current configuration.

        Returns (abs_m, abs_m_sliceavg, abs_psi, m_mean, psi_mean): the slice
        averages of |m_H| and |psi_H|, the modulus of the slice-averaged
        complex m_H, and the complex slice averages themselves.
        """
        if not getattr(self.graph, "has_units", False):
            return 0.0, 0.0, 0.0, 0j, 0j
        if self._measure_tables is None:
            self._build_measure_tables()
        t = self._measure_tables
        np.copyto(self._scratch, self.spins)
        abs_m_sum, abs_psi_sum = self.kern.measure_sweep(
            self.op, self._scratch, t["sublab0"], t["site_edges"],
            t["edge_i"], t["edge_j"], t["edge_sign"], t["edge_pos0"], t["edge_frus"],
            t["pm_re"], t["pm_im"], t["pp_re"], t["pp_im"],
            t["sub_sums"], t["frus_counts"], t["slicesum_sub"], t["slicesum_frus"],
        )
        L = self.L
        msnorm = getattr(self, "msnorm_factor", 6.0)
        m_scale = msnorm / (self.nn * A_NORM)
        m_mean = complex(np.dot(PHASE_M, t["slicesum_sub"])) * (m_scale / L)
        psi_mean = complex(np.dot(PHASE_PSI, t["slicesum_frus"])) / (self.nn * L)
        abs_m = abs_m_sum * m_scale / L
        abs_psi = abs_psi_sum / (self.nn * L)
        abs_m_sliceavg = abs(m_mean)
        return abs_m, abs_m_sliceavg, abs_psi, m_mean, psi_mean

    # ------------------------------------------------------------- validation
    def validate_configuration(self) -> str | None:
        """Re-derive the state invariants; None when valid, else a report."""
        n_scan = int(np.count_nonzero(self.op))
        if n_scan != self.n_h:
            return f"n_h = {self.n_h} but scan finds {n_scan} non-null slots"
        prop = self.spins.copy()
        field_parity = np.zeros(self.nn, np.int64)
        for p in range(self.L):
            code = int(self.op[p])
            if code == 0:
                continue
            kind = code & 3
            if kind == 2:
                site = code >> 2
                prop[site] = -prop[site]
                field_parity[site] += 1
            elif kind == 3:
                b = code >> 2
                i, j = self.bond_i[b], self.bond_j[b]
                if self.bond_sign[b] * prop[i] * prop[j] > 0:
                    return f"slice {p}: Ising operator on frustrated bond {b}"
        if not np.array_equal(prop, self.spins):
            return "propagation closure violated: alpha_L != alpha_0"
        odd = np.nonzero(field_parity % 2)[0]
        if len(odd):
            return f"site {int(odd[0])}: odd number of field operators"
        return None


def init_state(graph, config) -> SseState:
    """Build the chain state described by a RunConfig-like object."""
    init = getattr(config, "init", "random")
    spins = None
    if init != "random":
        if not init.startswith("file:"):
            raise ValueError(f"init mode must be 'random' or 'file:PATH', not {init!r}")
        spins = load_spin_file(init[5:], graph.nn)
    state = SseState(
        graph, beta=config.beta, g=config.g, seed=config.seed,
        stream=getattr(config, "stream", 0), spins=spins,
    )
    state.msnorm_factor = 6.0 if getattr(config, "msnorm", "per_sublattice") == "per_sublattice" else 1.0
    return state


def run_simulation(config, graph=None, progress=None) -> RunResult:
    """Thermalize, freeze the cutoff, measure `nbins` bins of `mstep` sweeps."""
    if graph is None:
        from .lattice import build_lattice

        graph = build_lattice(config.lx, config.ly, config.pattern)
    state = init_state(graph, config)
    t0 = time.perf_counter()
    for _ in range(config.isteps):
        state.mc_sweep(adjust=True)
    sat_thermal = state.saturation_count
    state.saturation_count = 0
    acc = MeasurementAccumulator(thin=config.thin)
    max_nh = 0
    for b in range(config.nbins):
        for _ in range(config.mstep):
            state.mc_sweep(adjust=False)
            slice_measure(state, acc)
            if state.n_h > max_nh:
                max_nh = state.n_h
        acc.close_bin()
        if progress is not None:
            progress(b + 1, config.nbins)
    saturated = state.saturation_count > 0
    meta = {
        "config": config.as_dict() if hasattr(config, "as_dict") else dict(vars(config)),
        "L_final": state.L,
        "max_nh": int(max_nh),
        "saturation_count": int(state.saturation_count),
        "saturation_thermal": int(sat_thermal),
        "wall_time_s": time.perf_counter() - t0,
        "backend": state.backend,
        "valid": not saturated,
        "saturated": saturated,
    }
    if saturated:
        meta["diagnostic"] = (
            "operator string saturated during measurement (n_h reached L); "
            "increase isteps so the cutoff can grow before it is frozen"
        )
    return RunResult.from_accumulator(acc, config.beta, graph, config.g, meta)
