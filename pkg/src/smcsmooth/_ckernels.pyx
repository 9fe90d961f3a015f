# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Signatures mirror :mod:`smcsmooth._pykernels` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

ctypedef cnp.uint64_t u64


def alias_setup(const double[::1] probs):
    cdef Py_ssize_t n = probs.shape[0]
    cdef Py_ssize_t i, s, l, ns = 0, nl = 0
    scaled_arr = np.empty(n, dtype=np.float64)
    prob_arr = np.empty(n, dtype=np.float64)
    alias_arr = np.empty(n, dtype=np.int64)
    small_arr = np.empty(n, dtype=np.int64)
    large_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] scaled = scaled_arr
    cdef double[::1] prob = prob_arr
    cdef cnp.int64_t[::1] alias = alias_arr
    cdef cnp.int64_t[::1] small = small_arr
    cdef cnp.int64_t[::1] large = large_arr
    for i in range(n):
        scaled[i] = probs[i] * n
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        l = large[nl]
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = (scaled[l] + scaled[s]) - 1.0
        if scaled[l] < 1.0:
            small[ns] = l
            ns += 1
        else:
            large[nl] = l
            nl += 1
    while nl > 0:
        nl -= 1
        l = large[nl]
        prob[l] = 1.0
        alias[l] = l
    while ns > 0:
        ns -= 1
        s = small[ns]
        prob[s] = 1.0
        alias[s] = s
    return prob_arr, alias_arr


def hilbert_keys(const u64[:, ::1] coords, int bits):
    cdef Py_ssize_t n = coords.shape[0]
    cdef Py_ssize_t d = coords.shape[1]
    cdef Py_ssize_t total = d * bits
    cdef Py_ssize_t nwords = (total + 63) // 64
    cdef Py_ssize_t pad = nwords * 64 - total
    cdef Py_ssize_t p, i, j, pos
    cdef u64 M, Q, P, t
    keys_arr = np.zeros((n, nwords), dtype=np.uint64)
    cdef u64[:, ::1] keys = keys_arr
    X_arr = np.empty(d, dtype=np.uint64)
    cdef u64[::1] X = X_arr
    M = (<u64>1) << (bits - 1)
    for p in range(n):
        for i in range(d):
            X[i] = coords[p, i]
        Q = M
        while Q > 1:
            P = Q - 1
            for i in range(d):
                if X[i] & Q:
                    X[0] ^= P
                else:
                    t = (X[0] ^ X[i]) & P
                    X[0] ^= t
                    X[i] ^= t
            Q >>= 1
        for i in range(1, d):
            X[i] ^= X[i - 1]
        t = 0
        Q = M
        while Q > 1:
            if X[d - 1] & Q:
                t ^= Q - 1
            Q >>= 1
        for i in range(d):
            X[i] ^= t
        pos = pad
        for j in range(bits - 1, -1, -1):
            for i in range(d):
                if (X[i] >> j) & 1:
                    keys[p, pos // 64] |= (<u64>1) << (63 - (pos % 64))
                pos += 1
    return keys_arr


def adjacent_traverse(const cnp.int64_t[::1] counts, const double[::1] tie_u):
    cdef Py_ssize_t n = counts.shape[0]
    cdef Py_ssize_t total = 0, i, k, a, b, prev_pos, nxt_pos, first = -1, last = -1
    f_arr = np.array(counts, dtype=np.int64)
    nxt_arr = np.full(n, -1, dtype=np.int64)
    prv_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] f = f_arr
    cdef cnp.int64_t[::1] nxt = nxt_arr
    cdef cnp.int64_t[::1] prv = prv_arr
    for i in range(n):
        if f[i] > 0:
            total += f[i]
            if first < 0:
                first = i
            else:
                nxt[last] = i
                prv[i] = last
            last = i
    out_arr = np.empty(total, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    i = first
    for k in range(total):
        out[k] = i
        f[i] -= 1
        a = nxt[i]
        b = prv[i]
        if f[i] == 0:
            if b >= 0:
                nxt[b] = a
            if a >= 0:
                prv[a] = b
        if a >= 0 and b >= 0:
            if f[a] > f[b]:
                i = a
            elif f[b] > f[a]:
                i = b
            elif tie_u[k] < 0.5:
                i = a
            else:
                i = b
        elif a >= 0:
            i = a
        elif b >= 0:
            i = b
    return out_arr


def gaussian_first_accept(const double[:, ::1] prev_mean, const double[:, ::1] linv,
                          double log_norm, double log_bound,
                          const double[:, ::1] x_new, const cnp.int64_t[:, ::1] cand,
                          const double[:, ::1] logu):
    cdef Py_ssize_t m = cand.shape[0]
    cdef Py_ssize_t b = cand.shape[1]
    cdef Py_ssize_t d = x_new.shape[1]
    cdef Py_ssize_t r, j, k, l, c
    cdef double quad, z, logm, excess, max_excess = -INFINITY
    pos_arr = np.full(m, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] pos = pos_arr
    diff_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] diff = diff_arr
    for r in range(m):
        for j in range(b):
            c = cand[r, j]
            for k in range(d):
                diff[k] = x_new[r, k] - prev_mean[c, k]
            quad = 0.0
            for k in range(d):
                z = 0.0
                for l in range(k + 1):
                    z += linv[k, l] * diff[l]
                quad += z * z
            logm = log_norm - 0.5 * quad
            excess = logm - log_bound
            if excess > max_excess:
                max_excess = excess
            if logu[r, j] <= excess:
                pos[r] = j
                break
    return pos_arr, max_excess
