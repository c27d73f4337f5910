# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernels: twin of `hexsse._pykernels`.

Same operator encoding, same xoshiro256** stream consumed in the same order,
same float expressions (the extension is built with -ffp-contract=off), so a
chain advanced by either backend is bit-identical.  Keep in lockstep with
the pure-Python module.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

BACKEND_NAME = "compiled"

ctypedef cnp.uint64_t u64
ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32
ctypedef cnp.int8_t i8
ctypedef cnp.uint8_t ub8


cdef inline u64 _rotl(u64 x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline u64 _next_u64(u64* s) noexcept nogil:
    cdef u64 result = _rotl(s[1] * <u64>5, 7) * <u64>9
    cdef u64 t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


cdef inline double _next_double(u64* s) noexcept nogil:
    return <double>(_next_u64(s) >> 11) * (1.0 / 9007199254740992.0)


def rng_next_u64(u64[::1] rng):
    """Expose the stream for cross-backend RNG tests."""
    return _next_u64(&rng[0])


def rng_next_double(u64[::1] rng):
    return _next_double(&rng[0])


def diagonal_sweep(i32[::1] op, i8[::1] spins, i32[::1] bond_i, i32[::1] bond_j,
                   i8[::1] bond_sign, u64[::1] rng, long n_h, double beta_c,
                   double p_const, long nn, long nb):
    cdef long L = op.shape[0]
    cdef long n = n_h
    cdef long sat = 0
    cdef long p, site, b
    cdef i32 code
    cdef u64* s = &rng[0]
    for p in range(L):
        code = op[p]
        if code == 0:
            if _next_double(s) < beta_c / (L - n):
                if _next_double(s) < p_const:
                    site = <long>(_next_double(s) * nn)
                    op[p] = <i32>(4 * site + 1)
                    n += 1
                else:
                    b = <long>(_next_double(s) * nb)
                    if bond_sign[b] * spins[bond_i[b]] * spins[bond_j[b]] < 0:
                        op[p] = <i32>(4 * b + 3)
                        n += 1
                if n == L:
                    sat += 1
        else:
            if (code & 3) == 2:
                site = code >> 2
                spins[site] = -spins[site]
            else:
                if _next_double(s) < (L - n + 1) / beta_c:
                    op[p] = 0
                    n -= 1
    return n, sat


def build_links(i32[::1] op, i32[::1] bond_i, i32[::1] bond_j, i8[::1] spins,
                i64[::1] link, i8[::1] legspin, i64[::1] first, i64[::1] last):
    cdef long L = op.shape[0]
    cdef long nn = first.shape[0]
    cdef long p, x, sidx, site, e_in, e_out, b
    cdef i32 code
    for x in range(4 * L):
        link[x] = -1
    for sidx in range(nn):
        first[sidx] = -1
        last[sidx] = -1
    for p in range(L):
        code = op[p]
        if code == 0:
            continue
        if (code & 3) == 3:
            b = code >> 2
            for sidx in range(2):
                site = bond_i[b] if sidx == 0 else bond_j[b]
                e_in = 4 * p + sidx
                e_out = 4 * p + 2 + sidx
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
            legspin[4 * p] = spins[site]
            if (code & 3) == 2:
                spins[site] = -spins[site]
            legspin[4 * p + 2] = spins[site]
            if last[site] >= 0:
                link[last[site]] = 4 * p
                link[4 * p] = last[site]
            else:
                first[site] = 4 * p
            last[site] = 4 * p + 2
    for sidx in range(nn):
        if first[sidx] >= 0:
            link[last[sidx]] = first[sidx]
            link[first[sidx]] = last[sidx]


def cluster_sweep(i32[::1] op, i64[::1] link, i8[::1] legspin, i64[::1] first,
                  i64[::1] last, i8[::1] spins, i64[::1] stack, ub8[::1] visited,
                  u64[::1] rng):
    cdef long L = op.shape[0]
    cdef long nn = first.shape[0]
    cdef long nlegs = 4 * L
    cdef long x0, x, y, sp, base, k, p, site
    cdef bint flip
    cdef i32 code
    cdef u64* s = &rng[0]
    for x in range(nlegs):
        visited[x] = 0
    for x0 in range(nlegs):
        if link[x0] < 0 or visited[x0]:
            continue
        flip = _next_double(s) < 0.5
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
                for k in range(4):
                    y = base + k
                    if not visited[y]:
                        visited[y] = 1
                        stack[sp] = y
                        sp += 1
    for site in range(nn):
        if first[site] >= 0:
            spins[site] = legspin[first[site]]
        elif _next_double(s) < 0.5:
            spins[site] = -spins[site]
    for p in range(L):
        code = op[p]
        if code != 0 and (code & 3) != 3:
            site = code >> 2
            if legspin[4 * p] == legspin[4 * p + 2]:
                op[p] = <i32>(4 * site + 1)
            else:
                op[p] = <i32>(4 * site + 2)


def measure_sweep(i32[::1] op, i8[::1] spins, i8[::1] sublab0, i32[::1] site_edges,
                  i32[::1] edge_i, i32[::1] edge_j, i8[::1] edge_sign, i8[::1] edge_pos0,
                  i8[::1] edge_frus, double[::1] pm_re, double[::1] pm_im,
                  double[::1] pp_re, double[::1] pp_im,
                  i64[::1] sub_sums, i64[::1] frus_counts,
                  i64[::1] slicesum_sub, i64[::1] slicesum_frus):
    cdef long L = op.shape[0]
    cdef long nn = spins.shape[0]
    cdef long n_edges = edge_i.shape[0]
    cdef long p, k, e, t, site
    cdef i32 code
    cdef i8 f, s_new
    cdef long run = 0
    cdef double abs_m_sum = 0.0, abs_psi_sum = 0.0
    cdef double mre, mim, pre, pim
    for k in range(6):
        sub_sums[k] = 0
        frus_counts[k] = 0
        slicesum_sub[k] = 0
        slicesum_frus[k] = 0
    for p in range(nn):
        sub_sums[sublab0[p]] += spins[p]
    for e in range(n_edges):
        f = 1 if edge_sign[e] * spins[edge_i[e]] * spins[edge_j[e]] > 0 else 0
        edge_frus[e] = f
        frus_counts[edge_pos0[e]] += f
    for p in range(L):
        run += 1
        code = op[p]
        if code != 0 and (code & 3) == 2:
            mre = 0.0
            mim = 0.0
            pre = 0.0
            pim = 0.0
            for k in range(6):
                mre += pm_re[k] * sub_sums[k]
                mim += pm_im[k] * sub_sums[k]
                pre += pp_re[k] * frus_counts[k]
                pim += pp_im[k] * frus_counts[k]
                slicesum_sub[k] += run * sub_sums[k]
                slicesum_frus[k] += run * frus_counts[k]
            abs_m_sum += run * sqrt(mre * mre + mim * mim)
            abs_psi_sum += run * sqrt(pre * pre + pim * pim)
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
        mre = 0.0
        mim = 0.0
        pre = 0.0
        pim = 0.0
        for k in range(6):
            mre += pm_re[k] * sub_sums[k]
            mim += pm_im[k] * sub_sums[k]
            pre += pp_re[k] * frus_counts[k]
            pim += pp_im[k] * frus_counts[k]
            slicesum_sub[k] += run * sub_sums[k]
            slicesum_frus[k] += run * frus_counts[k]
        abs_m_sum += run * sqrt(mre * mre + mim * mim)
        abs_psi_sum += run * sqrt(pre * pre + pim * pim)
    return abs_m_sum, abs_psi_sum
