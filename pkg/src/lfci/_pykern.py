"""Pure-Python kernels: m-separation reachability, collider-path reach,
and Gaussian partial-correlation decisions.

These are the fallback twins of the compiled versions in ``_fastkern``;
both implement the same algorithms step for step so results are identical.
All functions take plain arrays (CSR neighbor lists with per-endpoint marks)
rather than graph objects.
"""

import math

_HEAD = 1


def msep(indptr, nbr, mark_self, mark_other, pptr, pidx, i, j, s_mask):
    """1 iff i and j are m-separated given the conditioning mask.

    Reachability over states (node, arrived-with-arrowhead).  A collider on a
    walk passes iff it is an ancestor of the conditioning set; a non-collider
    passes iff it is outside the set.  Walk reachability equals path
    reachability for m-connection, so the state space is just 2p.
    """
    p = len(indptr) - 1
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    mark_self = mark_self.tolist()
    mark_other = mark_other.tolist()

    anc = bytearray(p)
    stack = []
    for v in range(p):
        if s_mask[v]:
            anc[v] = 1
            stack.append(v)
    pptr_l = pptr.tolist()
    pidx_l = pidx.tolist()
    while stack:
        v = stack.pop()
        for k in range(pptr_l[v], pptr_l[v + 1]):
            u = pidx_l[k]
            if not anc[u]:
                anc[u] = 1
                stack.append(u)

    seen = bytearray(2 * p)
    stack = []
    for e in range(indptr[i], indptr[i + 1]):
        v = nbr[e]
        if v == j:
            return 0
        hin = 1 if mark_other[e] == _HEAD else 0
        st = 2 * v + hin
        if not seen[st]:
            seen[st] = 1
            stack.append(st)
    while stack:
        st = stack.pop()
        v, hin = st >> 1, st & 1
        for e in range(indptr[v], indptr[v + 1]):
            w = nbr[e]
            if hin and mark_self[e] == _HEAD:
                if not anc[v]:  # collider needs an ancestor of S
                    continue
            elif s_mask[v]:  # non-collider blocked inside S
                continue
            if w == j:
                return 0
            nxt = 2 * w + (1 if mark_other[e] == _HEAD else 0)
            if not seen[nxt]:
                seen[nxt] = 1
                stack.append(nxt)
    return 1


def collider_reach(indptr, nbr, mark_self, mark_other, i, cap, allowed):
    """Byte mask of nodes v != i reachable from i by a walk of length <= cap
    whose interior vertices are all colliders (and, when an ``allowed`` mask
    is given, with every non-i vertex inside it)."""
    p = len(indptr) - 1
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    mark_self = mark_self.tolist()
    mark_other = mark_other.tolist()

    reached = bytearray(p)
    dist = [cap + 1] * (2 * p)
    frontier = []
    for e in range(indptr[i], indptr[i + 1]):
        v = nbr[e]
        if v == i or (allowed is not None and not allowed[v]):
            continue
        hin = 1 if mark_other[e] == _HEAD else 0
        st = 2 * v + hin
        reached[v] = 1
        if dist[st] > 1:
            dist[st] = 1
            frontier.append(st)
    d = 1
    while frontier and d < cap:
        nxt_frontier = []
        for st in frontier:
            v, hin = st >> 1, st & 1
            if not hin:
                continue
            for e in range(indptr[v], indptr[v + 1]):
                if mark_self[e] != _HEAD:
                    continue  # v must be a collider to extend through
                w = nbr[e]
                if w == i or (allowed is not None and not allowed[w]):
                    continue
                stw = 2 * w + (1 if mark_other[e] == _HEAD else 0)
                if dist[stw] > d + 1:
                    dist[stw] = d + 1
                    reached[w] = 1
                    nxt_frontier.append(stw)
        frontier = nxt_frontier
        d += 1
    return reached


def pcorr(sig, i, j, s_idx):
    """Partial correlation of i and j given the index list ``s_idx``.

    Returns (rho, status): status 0 ok, 1 singular conditioning block
    (a Cholesky pivot at or below the 1e-12 floor), 2 non-positive residual
    variance.
    """
    k = len(s_idx)
    if k == 0:
        vi = sig[i][i] if isinstance(sig, list) else sig[i, i]
        vj = sig[j][j] if isinstance(sig, list) else sig[j, j]
        cij = sig[i][j] if isinstance(sig, list) else sig[i, j]
        if vi <= 0.0 or vj <= 0.0:
            return 0.0, 2
        return cij / math.sqrt(vi * vj), 0

    def at(a, b):
        return sig[a][b] if isinstance(sig, list) else sig[a, b]

    low = [[0.0] * k for _ in range(k)]
    for c in range(k):
        acc = at(s_idx[c], s_idx[c])
        for t in range(c):
            acc -= low[c][t] * low[c][t]
        if acc <= 1e-12:
            return 0.0, 1
        dc = math.sqrt(acc)
        low[c][c] = dc
        for r in range(c + 1, k):
            acc = at(s_idx[r], s_idx[c])
            for t in range(c):
                acc -= low[r][t] * low[c][t]
            low[r][c] = acc / dc

    zu = [0.0] * k
    zv = [0.0] * k
    for r in range(k):
        au = at(s_idx[r], i)
        av = at(s_idx[r], j)
        for t in range(r):
            au -= low[r][t] * zu[t]
            av -= low[r][t] * zv[t]
        zu[r] = au / low[r][r]
        zv[r] = av / low[r][r]

    var_i = at(i, i)
    var_j = at(j, j)
    cov = at(i, j)
    for t in range(k):
        var_i -= zu[t] * zu[t]
        var_j -= zv[t] * zv[t]
        cov -= zu[t] * zv[t]
    if var_i <= 0.0 or var_j <= 0.0:
        return 0.0, 2
    return cov / math.sqrt(var_i * var_j), 0


def first_leq(sig, i, j, subsets, threshold):
    """Scan subsets (2D index array, one candidate set per row) in order and
    return (row_of_first_accept, n_evaluated, err_status, err_row).

    A row is accepted when |pcorr| <= threshold.  err_status mirrors pcorr's
    status codes; scanning aborts at the offending row.
    """
    n = len(subsets)
    sig_l = [list(map(float, row)) for row in sig]
    for r in range(n):
        row = [int(x) for x in subsets[r]]
        rho, status = pcorr(sig_l, i, j, row)
        if status != 0:
            return -1, r + 1, status, r
        if abs(rho) <= threshold:
            return r, r + 1, 0, -1
    return -1, n, 0, -1
