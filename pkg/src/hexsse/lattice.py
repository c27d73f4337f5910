"""Frustrated honeycomb lattice: geometry, couplings, sublattices, hexagon units.

Cell picture
------------
The lattice is a periodic honeycomb built from ``nx = lx + 1`` by
``ny = ly + 1`` two-site cells.  Cell (c, d) holds sites A and B; the three
bond families are

    e1(c, d):  A(c, d) - B(c, d)
    e2(c, d):  A(c, d) - B(c - 1, d)
    e3(c, d):  A(c, d) - B(c, d - 1)

with both cell indices periodic.  Site and bond counts are
``nn = 2 * nx * ny`` and ``nb = 3 * nx * ny``; there are ``nx * ny``
elementary hexagons.

Coupling pattern
----------------
The "default" pattern makes e1 bonds of even-c cells antiferromagnetic
(J = +1) and every other bond ferromagnetic (J = -1).  Each hexagon then
contains exactly one AF bond, the AF bonds form a perfect matching of the
dual triangular lattice, and every hexagon sees an odd number of AF bonds.
The "ferro" pattern sets every J = -1 and exists as an analytic anchor for
tests; it accepts any lx, ly >= 1.

Tracked units and labels
------------------------
Hexagons whose cell satisfies (c - d) % 3 == 0 are the tracked units; every
site belongs to exactly one of them, so the six in-unit labels induce six
sublattices of nn / 6 sites each.  Labels run around each unit so that the
unit's AF edge sits at edge position 6 (between sites 6 and 1); even-c and
odd-c units are rotated against each other by three steps to make that
possible.  The convention is frozen here and drawn by
``hexsse lattice --svg``; the ground-state oracle pins down the order
parameter values it produces.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Lattice",
    "ConfigurationError",
    "ConstructionError",
    "build_lattice",
    "frustration_indicator",
    "dump_lattice",
    "parse_lattice",
    "lattice_svg",
]


class ConfigurationError(ValueError):
    """A requested lattice or run parameter violates its constraint."""


class ConstructionError(RuntimeError):
    """An internal invariant failed after construction.  Never expected."""


@dataclass
class Lattice:
    lx: int
    ly: int
    pattern: str
    nn: int
    nb: int
    # per-site arrays
    site_c: np.ndarray  # cell column, int32
    site_d: np.ndarray  # cell row, int32
    site_sub: np.ndarray  # 0 = A, 1 = B, int8
    sublab: np.ndarray  # 1..6, or 0 when units are not defined, int8
    xy: np.ndarray  # real embedding for plotting, float64 (nn, 2)
    # per-bond arrays
    bond_i: np.ndarray  # int32
    bond_j: np.ndarray  # int32
    bond_sign: np.ndarray  # +1 AF / -1 F, int8
    bond_unit: np.ndarray  # tracked unit id or -1, int32
    bond_pos: np.ndarray  # edge position 1..6 within its unit, else 0, int8
    # hexagons
    plaq_bonds: np.ndarray  # (n_plaq, 6) int32
    plaq_sites: np.ndarray  # (n_plaq, 6) int32
    unit_sites: np.ndarray = field(default_factory=lambda: np.zeros((0, 6), np.int32))
    unit_bonds: np.ndarray = field(default_factory=lambda: np.zeros((0, 6), np.int32))

    @property
    def nx(self) -> int:
        return self.lx + 1

    @property
    def ny(self) -> int:
        return self.ly + 1

    @property
    def n_units(self) -> int:
        return self.unit_sites.shape[0]

    @property
    def has_units(self) -> bool:
        return self.n_units > 0

    @property
    def sum_abs_J(self) -> float:
        return float(self.nb)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        if (self.lx, self.ly, self.pattern) != (other.lx, other.ly, other.pattern):
            return False
        for name in (
            "site_c", "site_d", "site_sub", "sublab", "bond_i", "bond_j",
            "bond_sign", "bond_unit", "bond_pos", "plaq_bonds", "plaq_sites",
            "unit_sites", "unit_bonds",
        ):
            if not np.array_equal(getattr(self, name), getattr(other, name)):
                return False
        return True


def _site_id(nx: int, ny: int, c: int, d: int, sub: int) -> int:
    return 2 * ((d % ny) * nx + (c % nx)) + sub


def _bond_id(nx: int, ny: int, c: int, d: int, fam: int) -> int:
    return 3 * ((d % ny) * nx + (c % nx)) + fam


def build_lattice(lx: int, ly: int, pattern: str = "default") -> Lattice:
    """Construct the periodic lattice for the given hexagon-array size.

    The default pattern requires lx = 5 + 6m and ly = 2 + 3n; the
    all-ferromagnetic override accepts any lx, ly >= 1.
    """
    if pattern not in ("default", "ferro"):
        raise ConfigurationError(f"unknown coupling pattern {pattern!r}")
    if pattern == "default":
        if lx < 5 or (lx - 5) % 6 != 0:
            raise ConfigurationError(
                f"lx = {lx} violates lx = 5 + 6m required by the default pattern"
            )
        if ly < 2 or (ly - 2) % 3 != 0:
            raise ConfigurationError(
                f"ly = {ly} violates ly = 2 + 3n required by the default pattern"
            )
    else:
        if lx < 1 or ly < 1:
            raise ConfigurationError("ferro pattern requires lx >= 1 and ly >= 1")

    nx, ny = lx + 1, ly + 1
    nn = 2 * nx * ny
    nb = 3 * nx * ny

    site_c = np.empty(nn, np.int32)
    site_d = np.empty(nn, np.int32)
    site_sub = np.empty(nn, np.int8)
    xy = np.empty((nn, 2), np.float64)
    # embedding: cell basis (1, 0) and (1/2, sqrt(3)/2), B offset (1/2, 1/(2*sqrt(3)))
    bx, by = 0.5, 0.5 / math.sqrt(3.0)
    for d in range(ny):
        for c in range(nx):
            for sub in range(2):
                s = _site_id(nx, ny, c, d, sub)
                site_c[s] = c
                site_d[s] = d
                site_sub[s] = sub
                xy[s, 0] = c + 0.5 * d + sub * bx
                xy[s, 1] = d * (math.sqrt(3.0) / 2.0) + sub * by

    bond_i = np.empty(nb, np.int32)
    bond_j = np.empty(nb, np.int32)
    bond_sign = np.full(nb, -1, np.int8)
    for d in range(ny):
        for c in range(nx):
            a = _site_id(nx, ny, c, d, 0)
            bond_i[_bond_id(nx, ny, c, d, 0)] = a
            bond_j[_bond_id(nx, ny, c, d, 0)] = _site_id(nx, ny, c, d, 1)
            bond_i[_bond_id(nx, ny, c, d, 1)] = a
            bond_j[_bond_id(nx, ny, c, d, 1)] = _site_id(nx, ny, c - 1, d, 1)
            bond_i[_bond_id(nx, ny, c, d, 2)] = a
            bond_j[_bond_id(nx, ny, c, d, 2)] = _site_id(nx, ny, c, d - 1, 1)
            if pattern == "default" and c % 2 == 0:
                bond_sign[_bond_id(nx, ny, c, d, 0)] = 1

    # hexagon h(c, d): sites and bonds in one fixed cyclic orientation
    n_plaq = nx * ny
    plaq_bonds = np.empty((n_plaq, 6), np.int32)
    plaq_sites = np.empty((n_plaq, 6), np.int32)
    for d in range(ny):
        for c in range(nx):
            h = d * nx + c
            plaq_sites[h] = [
                _site_id(nx, ny, c, d, 0),
                _site_id(nx, ny, c, d, 1),
                _site_id(nx, ny, c + 1, d, 0),
                _site_id(nx, ny, c + 1, d - 1, 1),
                _site_id(nx, ny, c + 1, d - 1, 0),
                _site_id(nx, ny, c, d - 1, 1),
            ]
            plaq_bonds[h] = [
                _bond_id(nx, ny, c, d, 0),
                _bond_id(nx, ny, c + 1, d, 1),
                _bond_id(nx, ny, c + 1, d, 2),
                _bond_id(nx, ny, c + 1, d - 1, 0),
                _bond_id(nx, ny, c + 1, d - 1, 1),
                _bond_id(nx, ny, c, d, 2),
            ]

    sublab = np.zeros(nn, np.int8)
    bond_unit = np.full(nb, -1, np.int32)
    bond_pos = np.zeros(nb, np.int8)
    unit_sites = np.zeros((0, 6), np.int32)
    unit_bonds = np.zeros((0, 6), np.int32)
    if nx % 3 == 0 and ny % 3 == 0 and nx % 2 == 0:
        units_s, units_b = [], []
        for d in range(ny):
            for c in range(nx):
                if (c - d) % 3 != 0:
                    continue
                if c % 2 == 0:
                    ss = [
                        _site_id(nx, ny, c, d, 1),
                        _site_id(nx, ny, c + 1, d, 0),
                        _site_id(nx, ny, c + 1, d - 1, 1),
                        _site_id(nx, ny, c + 1, d - 1, 0),
                        _site_id(nx, ny, c, d - 1, 1),
                        _site_id(nx, ny, c, d, 0),
                    ]
                    bb = [
                        _bond_id(nx, ny, c + 1, d, 1),
                        _bond_id(nx, ny, c + 1, d, 2),
                        _bond_id(nx, ny, c + 1, d - 1, 0),
                        _bond_id(nx, ny, c + 1, d - 1, 1),
                        _bond_id(nx, ny, c, d, 2),
                        _bond_id(nx, ny, c, d, 0),
                    ]
                else:
                    ss = [
                        _site_id(nx, ny, c + 1, d - 1, 0),
                        _site_id(nx, ny, c, d - 1, 1),
                        _site_id(nx, ny, c, d, 0),
                        _site_id(nx, ny, c, d, 1),
                        _site_id(nx, ny, c + 1, d, 0),
                        _site_id(nx, ny, c + 1, d - 1, 1),
                    ]
                    bb = [
                        _bond_id(nx, ny, c + 1, d - 1, 1),
                        _bond_id(nx, ny, c, d, 2),
                        _bond_id(nx, ny, c, d, 0),
                        _bond_id(nx, ny, c + 1, d, 1),
                        _bond_id(nx, ny, c + 1, d, 2),
                        _bond_id(nx, ny, c + 1, d - 1, 0),
                    ]
                u = len(units_s)
                units_s.append(ss)
                units_b.append(bb)
                for k in range(6):
                    sublab[ss[k]] = k + 1
                    bond_unit[bb[k]] = u
                    bond_pos[bb[k]] = k + 1
        unit_sites = np.array(units_s, np.int32)
        unit_bonds = np.array(units_b, np.int32)

    lat = Lattice(
        lx=lx, ly=ly, pattern=pattern, nn=nn, nb=nb,
        site_c=site_c, site_d=site_d, site_sub=site_sub, sublab=sublab, xy=xy,
        bond_i=bond_i, bond_j=bond_j, bond_sign=bond_sign,
        bond_unit=bond_unit, bond_pos=bond_pos,
        plaq_bonds=plaq_bonds, plaq_sites=plaq_sites,
        unit_sites=unit_sites, unit_bonds=unit_bonds,
    )
    _validate(lat)
    return lat


def _validate(lat: Lattice) -> None:
    """Check structural invariants; raise ConstructionError on any defect."""
    nx, ny = lat.nx, lat.ny
    if lat.nn != 2 * nx * ny or lat.nb != 3 * nx * ny:
        raise ConstructionError("site/bond counts disagree with closed forms")
    deg = np.zeros(lat.nn, np.int64)
    np.add.at(deg, lat.bond_i, 1)
    np.add.at(deg, lat.bond_j, 1)
    if not np.all(deg == 3):
        raise ConstructionError("a site does not have exactly 3 incident bonds")
    per_plaq = np.zeros(lat.nb, np.int64)
    np.add.at(per_plaq, lat.plaq_bonds.ravel(), 1)
    if not np.all(per_plaq == 2):
        raise ConstructionError("a bond does not belong to exactly 2 plaquettes")
    if lat.pattern == "default":
        af = lat.bond_sign[lat.plaq_bonds] == 1
        counts = af.sum(axis=1)
        if not np.all(counts % 2 == 1):
            raise ConstructionError("a plaquette has an even number of AF bonds")
        if not np.all(counts == 1):
            raise ConstructionError("default pattern must give exactly 1 AF bond per plaquette")
    if lat.has_units:
        flat = lat.unit_sites.ravel()
        if len(np.unique(flat)) != lat.nn or len(flat) != lat.nn:
            raise ConstructionError("tracked units do not partition the site set")
        counts = np.bincount(lat.sublab, minlength=7)
        if counts[0] != 0 or not np.all(counts[1:] == lat.nn // 6):
            raise ConstructionError("sublattice labels are not balanced")
        for u in range(lat.n_units):
            s, b = lat.unit_sites[u], lat.unit_bonds[u]
            for k in range(6):
                pair = {int(lat.bond_i[b[k]]), int(lat.bond_j[b[k]])}
                if pair != {int(s[k]), int(s[(k + 1) % 6])}:
                    raise ConstructionError(f"unit {u} edge {k + 1} does not join sites {k + 1},{(k + 1) % 6 + 1}")
            if lat.pattern == "default" and lat.bond_sign[b[5]] != 1:
                raise ConstructionError(f"unit {u} AF edge is not at position 6")


def frustration_indicator(lat: Lattice, spins: np.ndarray, bond_id: int) -> int:
    """1 iff the bond's coupling energy is positive (J_ij * s_i * s_j > 0)."""
    if not 0 <= bond_id < lat.nb:
        raise IndexError(f"bond id {bond_id} out of range")
    prod = int(lat.bond_sign[bond_id]) * int(spins[lat.bond_i[bond_id]]) * int(spins[lat.bond_j[bond_id]])
    return 1 if prod > 0 else 0


def dump_lattice(lat: Lattice) -> str:
    """Serialize the lattice to JSON (schema: lx, ly, nn, nb, sites, bonds, plaquettes, units)."""
    doc = {
        "lx": lat.lx,
        "ly": lat.ly,
        "pattern": lat.pattern,
        "nn": lat.nn,
        "nb": lat.nb,
        "sites": [
            {
                "id": s,
                "c": int(lat.site_c[s]),
                "d": int(lat.site_d[s]),
                "sub": "AB"[lat.site_sub[s]],
                "sublattice": int(lat.sublab[s]),
                "x": float(lat.xy[s, 0]),
                "y": float(lat.xy[s, 1]),
            }
            for s in range(lat.nn)
        ],
        "bonds": [
            {
                "id": b,
                "i": int(lat.bond_i[b]),
                "j": int(lat.bond_j[b]),
                "J": int(lat.bond_sign[b]),
                "unit_pos": int(lat.bond_pos[b]),
                "unit": int(lat.bond_unit[b]),
            }
            for b in range(lat.nb)
        ],
        "plaquettes": lat.plaq_bonds.tolist(),
        "units": [
            {"id": u, "sites": lat.unit_sites[u].tolist(), "bonds": lat.unit_bonds[u].tolist()}
            for u in range(lat.n_units)
        ],
    }
    return json.dumps(doc, indent=1)


def parse_lattice(text: str) -> Lattice:
    """Rebuild a Lattice from `dump_lattice` output and re-validate it."""
    doc = json.loads(text)
    nn, nb = doc["nn"], doc["nb"]
    sites = sorted(doc["sites"], key=lambda r: r["id"])
    bonds = sorted(doc["bonds"], key=lambda r: r["id"])
    if len(sites) != nn or len(bonds) != nb:
        raise ConfigurationError("lattice document has inconsistent record counts")
    units = sorted(doc["units"], key=lambda r: r["id"])
    lat = Lattice(
        lx=doc["lx"], ly=doc["ly"], pattern=doc.get("pattern", "default"),
        nn=nn, nb=nb,
        site_c=np.array([r["c"] for r in sites], np.int32),
        site_d=np.array([r["d"] for r in sites], np.int32),
        site_sub=np.array([0 if r["sub"] == "A" else 1 for r in sites], np.int8),
        sublab=np.array([r["sublattice"] for r in sites], np.int8),
        xy=np.array([[r["x"], r["y"]] for r in sites], np.float64),
        bond_i=np.array([r["i"] for r in bonds], np.int32),
        bond_j=np.array([r["j"] for r in bonds], np.int32),
        bond_sign=np.array([r["J"] for r in bonds], np.int8),
        bond_unit=np.array([r["unit"] for r in bonds], np.int32),
        bond_pos=np.array([r["unit_pos"] for r in bonds], np.int8),
        plaq_bonds=np.array(doc["plaquettes"], np.int32),
        plaq_sites=_plaq_sites_from_bonds(np.array(doc["plaquettes"], np.int32),
                                          np.array([r["i"] for r in bonds], np.int32),
                                          np.array([r["j"] for r in bonds], np.int32)),
        unit_sites=(np.array([r["sites"] for r in units], np.int32)
                    if units else np.zeros((0, 6), np.int32)),
        unit_bonds=(np.array([r["bonds"] for r in units], np.int32)
                    if units else np.zeros((0, 6), np.int32)),
    )
    _validate(lat)
    return lat


def _plaq_sites_from_bonds(plaq_bonds, bond_i, bond_j) -> np.ndarray:
    """Recover the site cycle of each plaquette from its bond cycle."""
    n = plaq_bonds.shape[0]
    out = np.empty((n, 6), np.int32)
    for h in range(n):
        cyc = plaq_bonds[h]
        first = {bond_i[cyc[0]], bond_j[cyc[0]]}
        second = {bond_i[cyc[1]], bond_j[cyc[1]]}
        (start,) = first - second
        cur = start
        for k in range(6):
            out[h, k] = cur
            ends = {int(bond_i[cyc[k]]), int(bond_j[cyc[k]])}
            ends.discard(int(cur))
            (cur,) = ends
    return out


def lattice_svg(lat: Lattice, scale: float = 60.0) -> str:
    """Diagram of the coupling and labeling convention (AF red, F black)."""
    pad = scale
    w = (lat.nx + 0.5 * lat.ny) * scale + 2 * pad
    h = lat.ny * scale + 2 * pad

    def pt(s):
        return lat.xy[s, 0] * scale + pad, h - (lat.xy[s, 1] * scale + pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}">']
    wrap_cut = 1.5 * scale
    for b in range(lat.nb):
        (x1, y1), (x2, y2) = pt(lat.bond_i[b]), pt(lat.bond_j[b])
        if abs(x1 - x2) > wrap_cut or abs(y1 - y2) > wrap_cut:
            continue  # periodic wrap, omit for readability
        color = "#cc2222" if lat.bond_sign[b] == 1 else "#222222"
        width = 3 if lat.bond_sign[b] == 1 else 1.5
        dash = ' stroke-dasharray="6,3"' if lat.bond_pos[b] == 0 else ""
        out.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{color}" stroke-width="{width}"{dash}/>'
        )
    for s in range(lat.nn):
        x, y = pt(s)
        fill = "#ffffff" if lat.site_sub[s] == 0 else "#dddddd"
        out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="9" fill="{fill}" stroke="#333"/>')
        if lat.sublab[s]:
            out.append(
                f'<text x="{x:.1f}" y="{y + 4:.1f}" font-size="11" text-anchor="middle">'
                f"{lat.sublab[s]}</text>"
            )
    out.append("</svg>")
    return "\n".join(out)
