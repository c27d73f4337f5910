"""Pure-Python sweep kernels.

Reference implementation of the hot loops; `hexsse._kernels` is the compiled
twin.  Both consume the shared xoshiro256** stream in exactly the same order
and with the same float expressions, so a chain advanced by either backend
is bit-identical.  Keep any change here in lockstep with `_kernels.pyx`.

Operator-string encoding (int32 per slot):
    0            null
    4 * site + 1 constant on `site` (diagonal, matrix element g)
    4 * site + 2 field on `site` (off-diagonal, matrix element g)
    4 * bond + 3 Ising on `bond` (diagonal, matrix element 2|J|)

Leg numbering: slot p owns legs 4p..4p+3.  A site operator uses 4p (entry)
and 4p+2 (exit); an Ising operator uses 4p, 4p+1 (entries at sites i, j) and
4p+2, 4p+3 (exits).  Unused legs keep link = -1.
"""
from __future__ import annotations

import math

from ._rng import next_double

BACKEND_NAME = "python"


def diagonal_sweep(op, spins, bond_i, bond_j, bond_sign, rng, n_h, beta_c, p_const, nn, nb):
    """One diagonal-update pass over all slots.

    `spins` is the propagated state and must enter as |alpha_0>; field slots
    flip it along the way and closure returns it to |alpha_0> on exit.
    Returns (new n_h, saturation events).
    """
    L = len(op)
    n = n_h
    sat = 0
    for p in range(L):
        code = op[p]
        if code == 0:
            u = next_double(rng)
            if u < beta_c / (L - n):
                if next_double(rng) < p_const:
                    site = int(next_double(rng) * nn)
                    op[p] = 4 * site + 1
                    n += 1
                else:
                    b = int(next_double(rng) * nb)
                    if bond_sign[b] * spins[bond_i[b]] * spins[bond_j[b]] < 0:
                        op[p] = 4 * b + 3
                        n += 1
                if n == L:
                    sat += 1
        else:
            kind = code & 3
            if kind == 2:
                site = code >> 2
                spins[site] = -spins[site]
            else:
                if next_double(rng) < (L - n + 1) / beta_c:
                    op[p] = 0
                    n -= 1
    return n, sat


def build_links(op, bond_i, bond_j, spins, link, legspin, first, last):
    """Fill the linked-vertex structure for the current operator string.

    `spins` must enter as |alpha_0>; it is propagated in place (and returns
    to |alpha_0> by closure).  link[x] is the temporally adjacent leg on the
    same site line, with periodic wrap; legspin[x] is the propagated spin at
    the leg.  first/last give each site's first entry leg and last exit leg.
    """
    L = len(op)
    nn = len(first)
    for x in range(4 * L):
        link[x] = -1
    for s in range(nn):
        first[s] = -1
        last[s] = -1
    for p in range(L):
        code = op[p]
        if code == 0:
            continue
        kind = code & 3
        v0 = 4 * p
        if kind == 3:
            b = code >> 2
            for site, e_in, e_out in ((bond_i[b], v0, v0 + 2), (bond_j[b], v0 + 1, v0 + 3)):
                legspin[e_in] = spins[site]
                legspin[e_out] = spins[site]
                if last[site] >= 0:
                    link[last[site]] = e_in
                    link[e_in] = last[site]
                else:
                    first[site] = e_in
                last[site] = e_out
        else:
            site = code >> 2
            legspin[v0] = spins[site]
            if kind == 2:
                spins[site] = -spins[site]
            legspin[v0 + 2] = spins[site]
            if last[site] >= 0:
                link[last[site]] = v0
                link[v0] = last[site]
            else:
                first[site] = v0
            last[site] = v0 + 2
    for s in range(nn):
        if first[s] >= 0:
            link[last[s]] = first[s]
            link[first[s]] = last[s]


def cluster_sweep(op, link, legspin, first, last, spins, stack, visited, rng):
    """Flip leg clusters with probability 1/2 each.

    Ising operators join all four of their legs into one cluster; site
    operators terminate growth.  After flipping, |alpha_0> is read back from
    the first legs and site-operator kinds are re-derived from their leg
    spins (constant when entry == exit, field otherwise).  Sites without
    operators flip independently with probability 1/2.
    """
    L = len(op)
    nn = len(first)
    nlegs = 4 * L
    for x in range(nlegs):
        visited[x] = 0
    for x0 in range(nlegs):
        if link[x0] < 0 or visited[x0]:
            continue
        flip = next_double(rng) < 0.5
        sp = 0
        stack[sp] = x0
        sp += 1
        visited[x0] = 1
        while sp:
            sp -= 1
            x = stack[sp]
            if flip:
                legspin[x] = -legspin[x]
            y = link[x]
            if not visited[y]:
                visited[y] = 1
                stack[sp] = y
                sp += 1
            if (op[x >> 2] & 3) == 3:
                base = (x >> 2) * 4
                for y in (base, base + 1, base + 2, base + 3):
                    if not visited[y]:
                        visited[y] = 1
                        stack[sp] = y
                        sp += 1
    for s in range(nn):
        if first[s] >= 0:
            spins[s] = legspin[first[s]]
        elif next_double(rng) < 0.5:
            spins[s] = -spins[s]
    for p in range(L):
        code = op[p]
        if code != 0 and (code & 3) != 3:
            site = code >> 2
            op[p] = 4 * site + (1 if legspin[4 * p] == legspin[4 * p + 2] else 2)


def measure_sweep(op, spins, sublab0, site_edges, edge_i, edge_j, edge_sign, edge_pos0,
                  edge_frus, pm_re, pm_im, pp_re, pp_im, sub_sums, frus_counts,
                  slicesum_sub, slicesum_frus):
    """Slice averages of m_H and psi_H over alpha_p, p = 0..L-1.

    Maintains integer sublattice sums and per-position frustrated-edge counts
    incrementally across field flips; between flips the state is constant, so
    per-slice moduli accumulate by run length.  Returns the unnormalised
    (abs_m_sum, abs_psi_sum); integer accumulators arrive via the out arrays.
    `spins` must enter as |alpha_0>; propagated in place.
    """
    L = len(op)
    nn = len(spins)
    for k in range(6):
        sub_sums[k] = 0
        frus_counts[k] = 0
        slicesum_sub[k] = 0
        slicesum_frus[k] = 0
    for s in range(nn):
        sub_sums[sublab0[s]] += spins[s]
    n_edges = len(edge_i)
    for e in range(n_edges):
        f = 1 if edge_sign[e] * spins[edge_i[e]] * spins[edge_j[e]] > 0 else 0
        edge_frus[e] = f
        frus_counts[edge_pos0[e]] += f

    abs_m_sum = 0.0
    abs_psi_sum = 0.0
    run = 0

    def flush(run_len):
        nonlocal abs_m_sum, abs_psi_sum
        mre = mim = pre = pim = 0.0
        for k in range(6):
            mre += pm_re[k] * sub_sums[k]
            mim += pm_im[k] * sub_sums[k]
            pre += pp_re[k] * frus_counts[k]
            pim += pp_im[k] * frus_counts[k]
            slicesum_sub[k] += run_len * sub_sums[k]
            slicesum_frus[k] += run_len * frus_counts[k]
        abs_m_sum += run_len * math.sqrt(mre * mre + mim * mim)
        abs_psi_sum += run_len * math.sqrt(pre * pre + pim * pim)

    for p in range(L):
        run += 1
        code = op[p]
        if code != 0 and (code & 3) == 2:
            flush(run)
            run = 0
            site = code >> 2
            s_new = -spins[site]
            spins[site] = s_new
            sub_sums[sublab0[site]] += 2 * s_new
            for t in range(3):
                e = site_edges[3 * site + t]
                if e < 0:
                    continue
                f = 1 if edge_sign[e] * spins[edge_i[e]] * spins[edge_j[e]] > 0 else 0
                if f != edge_frus[e]:
                    frus_counts[edge_pos0[e]] += f - edge_frus[e]
                    edge_frus[e] = f
    if run:
        flush(run)
    return abs_m_sum, abs_psi_sum
