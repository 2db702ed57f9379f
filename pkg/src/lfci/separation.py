"""m-separation, local graphs, local-graph separators, Markov blankets,
moral graphs, and the separator-size statistics built on them.

The fast m-separation test runs a reachability traversal over states
(node, arrived-with-arrowhead) via the kernel backend; the brute-force
path enumerator is retained as its testing oracle.
"""

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import (
    AdjacentPair,
    CapExceeded,
    CircleMarkPresent,
    GraphTooLarge,
    InvalidConditioningSet,
)
from .mixed_graph import HEAD, TAIL, MixedGraph, ancestors, descendants, from_edges

UNBOUNDED = None

_BRUTE_LIMIT = 20


def _validate_query(g, i, j, s):
    if not (0 <= i < g.p and 0 <= j < g.p):
        raise InvalidConditioningSet(f"node out of range for p={g.p}")
    if i == j:
        raise InvalidConditioningSet("endpoints must be distinct")
    if i in s or j in s:
        raise InvalidConditioningSet(
            f"conditioning set must exclude the endpoints {i}, {j}"
        )
    for v in s:
        if not (0 <= v < g.p):
            raise InvalidConditioningSet(f"node {v} out of range for p={g.p}")


def m_separated(g, i, j, s):
    """True iff every path between i and j is blocked given ``s``.

    A path is blocked when some non-collider on it lies in ``s`` or some
    collider on it has no descendant in ``s``.
    """
    s = set(s)
    _validate_query(g, i, j, s)
    arr = g.arrays()
    if arr["has_circle"]:
        raise CircleMarkPresent("m-separation is undefined with circle marks")
    s_mask = np.zeros(g.p, dtype=np.uint8)
    for v in s:
        s_mask[v] = 1
    return bool(
        _kernels.msep(
            arr["indptr"],
            arr["nbr"],
            arr["mark_self"],
            arr["mark_other"],
            arr["pptr"],
            arr["pidx"],
            int(i),
            int(j),
            s_mask,
        )
    )


def m_separated_bruteforce(g, i, j, s):
    """Oracle twin of :func:`m_separated`: enumerate all simple paths and
    apply the blocking rules directly.  Limited to 20 nodes."""
    s = set(s)
    _validate_query(g, i, j, s)
    if g.p > _BRUTE_LIMIT:
        raise GraphTooLarge(f"brute-force separation limited to {_BRUTE_LIMIT} nodes")
    if g.arrays()["has_circle"]:
        raise CircleMarkPresent("m-separation is undefined with circle marks")
    desc_cache = {}

    def desc_of(v):
        if v not in desc_cache:
            desc_cache[v] = descendants(g, {v})
        return desc_cache[v]

    for path in _simple_paths(g, i, j, None):
        open_path = True
        for t in range(1, len(path) - 1):
            v = path[t]
            is_collider = (
                g.mark_at(v, path[t - 1]) == HEAD and g.mark_at(v, path[t + 1]) == HEAD
            )
            if is_collider:
                if not (desc_of(v) & s):
                    open_path = False
                    break
            elif v in s:
                open_path = False
                break
        if open_path:
            return False
    return True


def _skeleton_dists(g, src, banned_edge=None):
    """BFS hop distances from src over the skeleton; p means unreachable."""
    dist = [g.p] * g.p
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for w in g.neighbors(v):
                if banned_edge is not None and {v, w} == banned_edge:
                    continue
                if dist[w] > dist[v] + 1:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def _simple_paths(g, i, j, gamma):
    """Yield simple paths between i and j as node tuples.

    gamma caps the edge length; None means uncapped (so the caller must keep
    the graph small).  Distance-to-target pruning keeps the search tight.
    """
    cap = gamma if gamma is not None else g.p
    dist_j = _skeleton_dists(g, j)
    if dist_j[i] > cap:
        return
    on_path = [False] * g.p
    on_path[i] = True
    path = [i]

    def rec():
        v = path[-1]
        room = cap - (len(path) - 1)
        for w in g.neighbors(v):
            if w == j:
                yield tuple(path) + (j,)
                continue
            if on_path[w] or 1 + dist_j[w] > room:
                continue
            on_path[w] = True
            path.append(w)
            yield from rec()
            path.pop()
            on_path[w] = False

    yield from rec()


@dataclass(frozen=True)
class LocalGraph:
    """Subgraph induced by the nodes on short paths between an anchor pair.

    ``induced`` keeps the parent's node indexing (nodes outside
    ``node_subset`` are isolated), so separation queries carry over without
    relabeling.
    """

    parent: MixedGraph = field(repr=False)
    node_subset: frozenset
    induced: MixedGraph = field(repr=False)
    gamma: Optional[int]
    anchor: tuple


def local_graph(g, i, j, gamma):
    """Local graph over the nodes lying on some path between i and j of
    skeleton-length <= gamma."""
    if i == j:
        raise InvalidConditioningSet("anchor nodes must be distinct")
    subset = {i, j}
    for path in _simple_paths(g, i, j, gamma):
        subset.update(path)
    edges = [e for e in g.edges() if e.a in subset and e.b in subset]
    induced = from_edges(g.p, edges, labels=g.labels)
    return LocalGraph(
        parent=g,
        node_subset=frozenset(subset),
        induced=induced,
        gamma=gamma,
        anchor=(i, j),
    )


def count_short_paths(skel, i, j, gamma, stop=None):
    """Number of simple paths between i and j of length <= gamma in the
    skeleton.  ``stop`` short-circuits the count once it is exceeded."""
    n = 0
    for _ in _simple_paths(skel, i, j, gamma):
        n += 1
        if stop is not None and n > stop:
            return n
    return n


def has_local_path_property(skel, eta, gamma):
    """True iff every non-adjacent pair has at most ``eta`` simple paths of
    length <= gamma between them."""
    for i in range(skel.p):
        for j in range(i + 1, skel.p):
            if skel.adjacent(i, j):
                continue
            if count_short_paths(skel, i, j, gamma, stop=eta) > eta:
                return False
    return True


class SeparatorQuery(NamedTuple):
    """Local-separator search request: anchor pair, path-length bound gamma
    (None = unbounded), and maximum separator size eta."""

    i: int
    j: int
    gamma: Optional[int]
    eta: int


def find_local_separator(g, q):
    """Minimum-cardinality subset of the local graph's nodes (excluding the
    endpoints) that m-separates the anchor pair inside the local graph.

    Candidates are scanned by size then lexicographically over sorted node
    indices, so ties resolve deterministically.  Returns None when no
    separator of size <= eta exists.
    """
    if g.adjacent(q.i, q.j):
        raise AdjacentPair(f"nodes {q.i} and {q.j} are adjacent")
    lg = local_graph(g, q.i, q.j, q.gamma)
    candidates = sorted(lg.node_subset - {q.i, q.j})
    for size in range(0, min(q.eta, len(candidates)) + 1):
        for comb in itertools.combinations(candidates, size):
            if m_separated(lg.induced, q.i, q.j, set(comb)):
                return set(comb)
    return None


def is_local_separator(g, i, j, s, gamma):
    """True iff ``s`` is contained in the local graph's node set and
    m-separates i and j inside the local graph."""
    lg = local_graph(g, i, j, gamma)
    s = set(s)
    if not s <= lg.node_subset - {i, j}:
        return False
    return m_separated(lg.induced, i, j, s)


def L_gamma(g, gamma, eta_cap):
    """Maximum over non-adjacent pairs of the minimum local-separator size.

    Raises CapExceeded with the witness pair when some pair has no local
    separator of size <= eta_cap.
    """
    if g.p > _BRUTE_LIMIT:
        raise GraphTooLarge(f"L_gamma limited to {_BRUTE_LIMIT} nodes")
    best = 0
    for i in range(g.p):
        for j in range(i + 1, g.p):
            if g.adjacent(i, j):
                continue
            sep = find_local_separator(g, SeparatorQuery(i, j, gamma, eta_cap))
            if sep is None:
                raise CapExceeded(
                    f"minimum local separator of ({i},{j}) exceeds {eta_cap}",
                    pair=(i, j),
                )
            best = max(best, len(sep))
    return best


def markov_blanket(g, i, gamma=UNBOUNDED):
    """Adjacencies of i plus all nodes reachable from i by a collider path
    of length <= gamma (every non-endpoint a collider)."""
    arr = g.arrays()
    cap = int(gamma) if gamma is not None else g.p
    reached = _kernels.collider_reach(
        arr["indptr"], arr["nbr"], arr["mark_self"], arr["mark_other"],
        int(i), cap, None,
    )
    out = {v for v in range(g.p) if reached[v]}
    out.update(g.neighbors(i))
    out.discard(i)
    return out


def moral_graph(g, gamma=UNBOUNDED):
    """Undirected graph joining i and j whenever one lies in the other's
    (gamma-truncated) Markov blanket."""
    blankets = [markov_blanket(g, v, gamma) for v in range(g.p)]
    edges = []
    for i in range(g.p):
        for j in range(i + 1, g.p):
            if j in blankets[i] or i in blankets[j]:
                edges.append((i, j, TAIL, TAIL))
    return from_edges(g.p, edges, labels=g.labels)


def L_mb(g, gamma, eta_cap):
    """Maximum minimum local-separator size over non-adjacent pairs that are
    adjacent in the gamma-truncated moral graph."""
    if g.p > _BRUTE_LIMIT:
        raise GraphTooLarge(f"L_mb limited to {_BRUTE_LIMIT} nodes")
    moral = moral_graph(g, gamma)
    best = 0
    for i in range(g.p):
        for j in range(i + 1, g.p):
            if g.adjacent(i, j) or not moral.adjacent(i, j):
                continue
            sep = find_local_separator(g, SeparatorQuery(i, j, gamma, eta_cap))
            if sep is None:
                raise CapExceeded(
                    f"minimum local separator of ({i},{j}) exceeds {eta_cap}",
                    pair=(i, j),
                )
            best = max(best, len(sep))
    return best


def d_sep(g, i, j):
    """Nodes connected to i by a collider path on which every node is an
    ancestor of i or j, minus the endpoints (ready for conditioning)."""
    arr = g.arrays()
    allowed_nodes = ancestors(g, {i}) | ancestors(g, {j})
    allowed = np.zeros(g.p, dtype=np.uint8)
    for v in allowed_nodes:
        allowed[v] = 1
    reached = _kernels.collider_reach(
        arr["indptr"], arr["nbr"], arr["mark_self"], arr["mark_other"],
        int(i), g.p, allowed,
    )
    out = {v for v in range(g.p) if reached[v]}
    out.discard(i)
    out.discard(j)
    return out


def is_maximal(g):
    """True iff every non-adjacent pair is m-separated by its D-SEP set.

    For ancestral graphs a separable pair is always separated by D-SEP, so
    this decides maximality exactly.
    """
    if g.p > _BRUTE_LIMIT:
        raise GraphTooLarge(f"is_maximal limited to {_BRUTE_LIMIT} nodes")
    for i in range(g.p):
        for j in range(i + 1, g.p):
            if g.adjacent(i, j):
                continue
            if m_separated(g, i, j, d_sep(g, i, j)):
                continue
            if m_separated(g, j, i, d_sep(g, j, i)):
                continue
            return False
    return True
