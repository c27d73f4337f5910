"""Diagonal observables: energy density, sublattice magnetizations, the
primary (m_H) and secondary (psi_H) order parameters, and binned statistics.

Conventions
-----------
Six sublattices s = 1..6 enter the primary order parameter with phases
exp(i (2s-1) pi / 12); the normalisation a = sqrt(2) + sqrt(6) makes the
fully polarised configuration come out at m_H = i exactly under the default
per-sublattice magnetization m_s = (6/N) sum_{i in s} sigma_i.  The switch
``msnorm="literal"`` uses m_s = (1/N) sum instead, which caps |m_H| at 1/6.

psi_k counts the fraction of tracked hexagon units whose edge at position k
is frustrated; psi_H = sum_k exp(i k pi / 3) psi_k, so a state with every
unit frustrated at one common position k has |psi_H| = 1/6 exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "A_NORM",
    "PHASE_M",
    "PHASE_PSI",
    "sublattice_magnetizations",
    "primary_order_parameter",
    "secondary_order_parameter",
    "energy_density",
    "bin_statistics",
    "MeasurementAccumulator",
    "RunResult",
    "slice_measure",
]

A_NORM = math.sqrt(2.0) + math.sqrt(6.0)
PHASE_M = np.array([cmath.exp(1j * (2 * s - 1) * math.pi / 12.0) for s in range(1, 7)])
PHASE_PSI = np.array([cmath.exp(1j * k * math.pi / 3.0) for k in range(1, 7)])

MS_NORMS = ("per_sublattice", "literal")


def _check_spins(lat, spins: np.ndarray) -> None:
    if len(spins) != lat.nn:
        raise ValueError(f"spin array length {len(spins)} != nn = {lat.nn}")


def sublattice_magnetizations(lat, spins: np.ndarray, msnorm: str = "per_sublattice") -> np.ndarray:
    """m_s for s = 1..6; per-sublattice normalisation maps full polarisation to 1."""
    _check_spins(lat, spins)
    if not lat.has_units:
        raise ValueError("lattice carries no sublattice annotation")
    if msnorm not in MS_NORMS:
        raise ValueError(f"msnorm must be one of {MS_NORMS}")
    sums = np.zeros(6)
    np.add.at(sums, np.asarray(lat.sublab) - 1, spins)
    factor = 6.0 / lat.nn if msnorm == "per_sublattice" else 1.0 / lat.nn
    return factor * sums


def primary_order_parameter(lat, spins: np.ndarray, msnorm: str = "per_sublattice") -> complex:
    """Phase-weighted sublattice sum; antisymmetric under a global spin flip."""
    ms = sublattice_magnetizations(lat, spins, msnorm)
    return complex(np.dot(PHASE_M, ms) / A_NORM)


def secondary_order_parameter(lat, spins: np.ndarray) -> complex:
    """Phase-weighted frustrated-edge frequencies over the tracked units."""
    _check_spins(lat, spins)
    if not lat.has_units:
        raise ValueError("lattice carries no unit annotation")
    ub = lat.unit_bonds
    i = np.asarray(lat.bond_i)[ub]
    j = np.asarray(lat.bond_j)[ub]
    sgn = np.asarray(lat.bond_sign)[ub]
    frus = (sgn * spins[i] * spins[j]) > 0  # (n_units, 6)
    counts = frus.sum(axis=0)
    return complex(np.dot(PHASE_PSI, counts) / lat.nn)


def energy_density(n_mean: float, beta: float, graph, g: float) -> float:
    """Energy per site from the mean non-null operator count."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if n_mean < 0:
        raise ValueError("operator count cannot be negative")
    return -n_mean / (beta * graph.nn) + g + graph.sum_abs_J / graph.nn


def bin_statistics(bins) -> tuple[float, float]:
    """Grand mean and standard error (std of bin means / sqrt(nbins))."""
    arr = np.asarray(bins, np.float64)
    if arr.size < 2:
        raise ValueError("need at least 2 bins for an error estimate")
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


_BIN_KEYS = ("n", "abs_mH", "abs_mH_sliceavg", "abs_psiH")


class MeasurementAccumulator:
    """Per-bin running sums plus a thinned stream of slice-averaged samples."""

    def __init__(self, thin: int = 1):
        if thin < 1:
            raise ValueError("thin must be a positive integer")
        self.thin = thin
        self.sweep = 0
        self._bin_sums = {k: 0.0 for k in _BIN_KEYS}
        self._bin_count = 0
        self.bins = {k: [] for k in _BIN_KEYS}
        self.samples = []  # rows (sweep, Re m, Im m, Re psi, Im psi)

    def add_sweep(self, n_h: int, abs_m: float, abs_m_sliceavg: float,
                  abs_psi: float, m_mean: complex, psi_mean: complex) -> None:
        self.sweep += 1
        self._bin_count += 1
        self._bin_sums["n"] += n_h
        self._bin_sums["abs_mH"] += abs_m
        self._bin_sums["abs_mH_sliceavg"] += abs_m_sliceavg
        self._bin_sums["abs_psiH"] += abs_psi
        if self.sweep % self.thin == 0:
            self.samples.append(
                (self.sweep, m_mean.real, m_mean.imag, psi_mean.real, psi_mean.imag)
            )

    def close_bin(self) -> None:
        if self._bin_count == 0:
            raise ValueError("closing an empty bin")
        for k in _BIN_KEYS:
            self.bins[k].append(self._bin_sums[k] / self._bin_count)
            self._bin_sums[k] = 0.0
        self._bin_count = 0


def slice_measure(state, acc: MeasurementAccumulator) -> MeasurementAccumulator:
    """Measure the slice averages of the current configuration into `acc`."""
    abs_m, abs_m_sliceavg, abs_psi, m_mean, psi_mean = state.measure_sweep()
    acc.add_sweep(state.n_h, abs_m, abs_m_sliceavg, abs_psi, m_mean, psi_mean)
    return acc


@dataclass
class RunResult:
    bins: dict[str, np.ndarray]
    means: dict[str, float]
    errors: dict[str, float]
    samples: np.ndarray  # (k, 5): sweep, Re m, Im m, Re psi, Im psi
    metadata: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return bool(self.metadata.get("valid", True))

    @classmethod
    def from_accumulator(cls, acc: MeasurementAccumulator, beta: float, graph,
                         g: float, metadata: dict) -> "RunResult":
        bins = {k: np.asarray(v) for k, v in acc.bins.items()}
        bins["e"] = np.array([energy_density(n, beta, graph, g) for n in bins["n"]])
        means, errors = {}, {}
        for k, v in bins.items():
            means[k], errors[k] = bin_statistics(v)
        samples = (np.asarray(acc.samples)
                   if acc.samples else np.zeros((0, 5)))
        return cls(bins=bins, means=means, errors=errors, samples=samples,
                   metadata=metadata)
