# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: m-separation reachability, collider-path reach, and
Gaussian partial-correlation decisions.

Algorithmic twin of ``_pykern``; both follow the same pseudocode so either
backend gives identical results.
"""

import numpy as np

cdef int _HEAD = 1


def msep(indptr, nbr, mark_self, mark_other, pptr, pidx, int i, int j, s_mask):
    """1 iff i and j are m-separated given the conditioning mask."""
    cdef int[:] ip = indptr
    cdef int[:] nb = nbr
    cdef signed char[:] ms = mark_self
    cdef signed char[:] mo = mark_other
    cdef int[:] pp = pptr
    cdef int[:] pi = pidx
    cdef unsigned char[:] sm = s_mask
    cdef int p = ip.shape[0] - 1
    cdef int v, w, e, k, st, nxt, hin, top

    anc_arr = np.zeros(p, dtype=np.uint8)
    cdef unsigned char[:] anc = anc_arr
    stack_arr = np.empty(2 * p + 2, dtype=np.int32)
    cdef int[:] stack = stack_arr
    top = 0
    for v in range(p):
        if sm[v]:
            anc[v] = 1
            stack[top] = v
            top += 1
    while top > 0:
        top -= 1
        v = stack[top]
        for k in range(pp[v], pp[v + 1]):
            w = pi[k]
            if not anc[w]:
                anc[w] = 1
                stack[top] = w
                top += 1

    seen_arr = np.zeros(2 * p, dtype=np.uint8)
    cdef unsigned char[:] seen = seen_arr
    sstack_arr = np.empty(2 * p + 2, dtype=np.int32)
    cdef int[:] sstack = sstack_arr
    top = 0
    for e in range(ip[i], ip[i + 1]):
        v = nb[e]
        if v == j:
            return 0
        hin = 1 if mo[e] == _HEAD else 0
        st = 2 * v + hin
        if not seen[st]:
            seen[st] = 1
            sstack[top] = st
            top += 1
    while top > 0:
        top -= 1
        st = sstack[top]
        v = st >> 1
        hin = st & 1
        for e in range(ip[v], ip[v + 1]):
            w = nb[e]
            if hin and ms[e] == _HEAD:
                if not anc[v]:  # collider needs an ancestor of S
                    continue
            elif sm[v]:  # non-collider blocked inside S
                continue
            if w == j:
                return 0
            nxt = 2 * w + (1 if mo[e] == _HEAD else 0)
            if not seen[nxt]:
                seen[nxt] = 1
                sstack[top] = nxt
                top += 1
    return 1


def collider_reach(indptr, nbr, mark_self, mark_other, int i, int cap, allowed):
    """Byte mask of nodes v != i reachable from i by a walk of length <= cap
    whose interior vertices are all colliders (restricted to ``allowed``)."""
    cdef int[:] ip = indptr
    cdef int[:] nb = nbr
    cdef signed char[:] ms = mark_self
    cdef signed char[:] mo = mark_other
    cdef int p = ip.shape[0] - 1
    cdef int v, w, e, st, stw, hin, d, n_cur, n_nxt, t
    cdef unsigned char[:] al
    cdef bint has_allowed = allowed is not None
    if has_allowed:
        al = allowed

    reached_arr = np.zeros(p, dtype=np.uint8)
    cdef unsigned char[:] reached = reached_arr
    dist_arr = np.full(2 * p, cap + 1, dtype=np.int32)
    cdef int[:] dist = dist_arr
    cur_arr = np.empty(2 * p, dtype=np.int32)
    nxt_arr = np.empty(2 * p, dtype=np.int32)
    cdef int[:] cur = cur_arr
    cdef int[:] nxt_f = nxt_arr

    n_cur = 0
    for e in range(ip[i], ip[i + 1]):
        v = nb[e]
        if v == i:
            continue
        if has_allowed and not al[v]:
            continue
        hin = 1 if mo[e] == _HEAD else 0
        st = 2 * v + hin
        reached[v] = 1
        if dist[st] > 1:
            dist[st] = 1
            cur[n_cur] = st
            n_cur += 1
    d = 1
    while n_cur > 0 and d < cap:
        n_nxt = 0
        for t in range(n_cur):
            st = cur[t]
            v = st >> 1
            hin = st & 1
            if not hin:
                continue
            for e in range(ip[v], ip[v + 1]):
                if ms[e] != _HEAD:
                    continue  # v must be a collider to extend through
                w = nb[e]
                if w == i:
                    continue
                if has_allowed and not al[w]:
                    continue
                stw = 2 * w + (1 if mo[e] == _HEAD else 0)
                if dist[stw] > d + 1:
                    dist[stw] = d + 1
                    reached[w] = 1
                    nxt_f[n_nxt] = stw
                    n_nxt += 1
        for t in range(n_nxt):
            cur[t] = nxt_f[t]
        n_cur = n_nxt
        d += 1
    return reached_arr


cdef int _pcorr_core(double[:, :] sig, int i, int j, int* s_idx, int k,
                     double* low, double* zu, double* zv, double* rho_out):
    """Shared Cholesky-based partial correlation; returns status code."""
    cdef int c, r, t
    cdef double acc, dc, var_i, var_j, cov
    if k == 0:
        var_i = sig[i, i]
        var_j = sig[j, j]
        if var_i <= 0.0 or var_j <= 0.0:
            rho_out[0] = 0.0
            return 2
        rho_out[0] = sig[i, j] / ((var_i * var_j) ** 0.5)
        return 0
    for c in range(k):
        acc = sig[s_idx[c], s_idx[c]]
        for t in range(c):
            acc -= low[c * k + t] * low[c * k + t]
        if acc <= 1e-12:
            rho_out[0] = 0.0
            return 1
        dc = acc ** 0.5
        low[c * k + c] = dc
        for r in range(c + 1, k):
            acc = sig[s_idx[r], s_idx[c]]
            for t in range(c):
                acc -= low[r * k + t] * low[c * k + t]
            low[r * k + c] = acc / dc
    for r in range(k):
        acc = sig[s_idx[r], i]
        cov = sig[s_idx[r], j]
        for t in range(r):
            acc -= low[r * k + t] * zu[t]
            cov -= low[r * k + t] * zv[t]
        zu[r] = acc / low[r * k + r]
        zv[r] = cov / low[r * k + r]
    var_i = sig[i, i]
    var_j = sig[j, j]
    cov = sig[i, j]
    for t in range(k):
        var_i -= zu[t] * zu[t]
        var_j -= zv[t] * zv[t]
        cov -= zu[t] * zv[t]
    if var_i <= 0.0 or var_j <= 0.0:
        rho_out[0] = 0.0
        return 2
    rho_out[0] = cov / ((var_i * var_j) ** 0.5)
    return 0


def pcorr(sig, int i, int j, s_idx):
    """Partial correlation of i and j given s_idx; returns (rho, status)."""
    sig_arr = np.ascontiguousarray(sig, dtype=np.float64)
    cdef double[:, :] sg = sig_arr
    idx_arr = np.ascontiguousarray(s_idx, dtype=np.int32)
    cdef int[:] sid = idx_arr
    cdef int k = sid.shape[0]
    low_arr = np.zeros(k * k if k else 1, dtype=np.float64)
    zu_arr = np.zeros(k if k else 1, dtype=np.float64)
    zv_arr = np.zeros(k if k else 1, dtype=np.float64)
    cdef double[:] low = low_arr
    cdef double[:] zu = zu_arr
    cdef double[:] zv = zv_arr
    cdef double rho = 0.0
    cdef int status
    cdef int* sp = NULL
    if k > 0:
        sp = <int*> &sid[0]
    status = _pcorr_core(sg, i, j, sp, k, &low[0], &zu[0], &zv[0], &rho)
    return rho, status


def first_leq(sig, int i, int j, subsets, double threshold):
    """Scan subset rows in order; return (row_of_first_accept, n_evaluated,
    err_status, err_row).  A row is accepted when |pcorr| <= threshold."""
    sig_arr = np.ascontiguousarray(sig, dtype=np.float64)
    cdef double[:, :] sg = sig_arr
    sub_arr = np.ascontiguousarray(subsets, dtype=np.int32)
    cdef int[:, :] sub = sub_arr
    cdef int n = sub.shape[0]
    cdef int k = sub.shape[1] if n > 0 else 0
    low_arr = np.zeros(k * k if k else 1, dtype=np.float64)
    zu_arr = np.zeros(k if k else 1, dtype=np.float64)
    zv_arr = np.zeros(k if k else 1, dtype=np.float64)
    cdef double[:] low = low_arr
    cdef double[:] zu = zu_arr
    cdef double[:] zv = zv_arr
    cdef double rho = 0.0
    cdef int r, c, status
    cdef int* sp
    for r in range(n):
        if k > 0:
            sp = <int*> &sub[r, 0]
        else:
            sp = NULL
        for c in range(k * k):
            low[c] = 0.0
        status = _pcorr_core(sg, i, j, sp, k, &low[0], &zu[0], &zv[0], &rho)
        if status != 0:
            return -1, r + 1, status, r
        if rho <= threshold and rho >= -threshold:
            return r, r + 1, 0, -1
    return -1, n, 0, -1
