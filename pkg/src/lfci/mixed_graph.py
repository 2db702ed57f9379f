"""Mixed graphs over dense integer nodes with three endpoint marks.

An edge between a and b carries one mark at each endpoint (tail, head or
circle), which encodes all six edge types: a --> b, a <-> b, a --- b,
a o-> b, a o-o b, a o-- b.  Graphs are treated as immutable after
construction; the orientation engine works on private copies.
"""

from __future__ import annotations

import enum
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    CircleMarkPresent,
    DuplicateEdge,
    GraphTooLarge,
    ParseError,
    SelfLoop,
)


class Mark(enum.IntEnum):
    TAIL = 0
    HEAD = 1
    CIRCLE = 2


TAIL = Mark.TAIL
HEAD = Mark.HEAD
CIRCLE = Mark.CIRCLE


class GraphClass(enum.Enum):
    DAG = "dag"
    MAG = "mag"
    PAG = "pag"
    UNDIRECTED = "undirected"


class Edge(NamedTuple):
    a: int
    b: int
    mark_at_a: Mark
    mark_at_b: Mark


class AncestralCheck(NamedTuple):
    ok: bool
    kind: Optional[str]
    witness: Optional[tuple]

    def __bool__(self) -> bool:
        return self.ok


class MixedGraph:
    """Simple mixed graph on nodes 0..p-1 with O(1) endpoint-mark lookup."""

    __slots__ = ("p", "labels", "_adj", "_marks", "_cache")

    def __init__(self, p: int, labels: Optional[Sequence[str]] = None):
        if p < 0:
            raise ValueError("node count must be non-negative")
        self.p = p
        self.labels = list(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != p:
            raise ValueError("label count must equal node count")
        self._adj: list[set] = [set() for _ in range(p)]
        # _marks[(u, v)] = mark at u on the edge between u and v
        self._marks: dict = {}
        self._cache: dict = {}

    # -- construction -------------------------------------------------

    def _check_pair(self, a: int, b: int) -> None:
        if a == b:
            raise SelfLoop(f"self loop at node {a}")
        if not (0 <= a < self.p and 0 <= b < self.p):
            raise ValueError(f"node out of range: ({a},{b}) with p={self.p}")

    def _add_edge(self, a: int, b: int, mark_at_a: Mark, mark_at_b: Mark) -> None:
        self._check_pair(a, b)
        if b in self._adj[a]:
            raise DuplicateEdge(f"edge ({a},{b}) already present")
        self._adj[a].add(b)
        self._adj[b].add(a)
        self._marks[(a, b)] = Mark(mark_at_a)
        self._marks[(b, a)] = Mark(mark_at_b)
        self._cache.clear()

    def _remove_edge(self, a: int, b: int) -> None:
        self._adj[a].discard(b)
        self._adj[b].discard(a)
        self._marks.pop((a, b), None)
        self._marks.pop((b, a), None)
        self._cache.clear()

    def _set_mark(self, at: int, other: int, mark: Mark) -> None:
        if other not in self._adj[at]:
            raise ValueError(f"no edge between {at} and {other}")
        self._marks[(at, other)] = Mark(mark)
        self._cache.clear()

    def copy(self) -> "MixedGraph":
        g = MixedGraph(self.p, self.labels)
        g._adj = [set(s) for s in self._adj]
        g._marks = dict(self._marks)
        return g

    # -- queries ------------------------------------------------------

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._adj[a]

    def mark_at(self, at: int, other: int) -> Mark:
        """Mark at endpoint `at` on the edge between `at` and `other`."""
        return self._marks[(at, other)]

    def neighbors(self, i: int) -> tuple:
        return tuple(sorted(self._adj[i]))

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def max_degree(self) -> int:
        return max((len(s) for s in self._adj), default=0)

    def edges(self) -> Iterator[Edge]:
        for (a, b), ma in sorted(self._marks.items()):
            if a < b:
                yield Edge(a, b, ma, self._marks[(b, a)])

    def edge_count(self) -> int:
        return len(self._marks) // 2

    def parents(self, i: int) -> tuple:
        """Nodes u with u --> i (tail at u, head at i)."""
        return tuple(
            u
            for u in self.neighbors(i)
            if self._marks[(u, i)] == TAIL and self._marks[(i, u)] == HEAD
        )

    def children(self, i: int) -> tuple:
        return tuple(
            u
            for u in self.neighbors(i)
            if self._marks[(i, u)] == TAIL and self._marks[(u, i)] == HEAD
        )

    def has_circle_marks(self) -> bool:
        return any(m == CIRCLE for m in self._marks.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self.p == other.p and self._marks == other._marks

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __repr__(self) -> str:
        return f"MixedGraph(p={self.p}, edges={self.edge_count()})"

    def relabel(self, perm: Sequence[int]) -> "MixedGraph":
        """New graph where old node i becomes perm[i]."""
        if sorted(perm) != list(range(self.p)):
            raise ValueError("perm must be a permutation of 0..p-1")
        labels = None
        if self.labels is not None:
            labels = [""] * self.p
            for i, lab in enumerate(self.labels):
                labels[perm[i]] = lab
        g = MixedGraph(self.p, labels)
        for e in self.edges():
            g._add_edge(perm[e.a], perm[e.b], e.mark_at_a, e.mark_at_b)
        return g

    # -- array form for the reachability kernels ----------------------

    def arrays(self) -> dict:
        """CSR-style arrays: neighbor lists with per-endpoint marks plus
        parent lists for ancestor closures.  Cached; invalidated on mutation."""
        cached = self._cache.get("arrays")
        if cached is not None:
            return cached
        p = self.p
        deg = np.zeros(p + 1, dtype=np.int32)
        for i in range(p):
            deg[i + 1] = len(self._adj[i])
        indptr = np.cumsum(deg, dtype=np.int32)
        m = int(indptr[-1])
        nbr = np.zeros(m, dtype=np.int32)
        mark_self = np.zeros(m, dtype=np.int8)
        mark_other = np.zeros(m, dtype=np.int8)
        pos = indptr[:-1].copy()
        for i in range(p):
            for v in sorted(self._adj[i]):
                k = pos[i]
                nbr[k] = v
                mark_self[k] = int(self._marks[(i, v)])
                mark_other[k] = int(self._marks[(v, i)])
                pos[i] += 1
        plists = [[] for _ in range(p)]
        for (u, v), mu in self._marks.items():
            if mu == TAIL and self._marks[(v, u)] == HEAD:
                plists[v].append(u)  # u --> v
        pptr = np.zeros(p + 1, dtype=np.int32)
        for i in range(p):
            pptr[i + 1] = pptr[i] + len(plists[i])
        pidx = np.zeros(int(pptr[-1]), dtype=np.int32)
        for i in range(p):
            pidx[pptr[i]:pptr[i + 1]] = sorted(plists[i])
        out = {
            "indptr": indptr,
            "nbr": nbr,
            "mark_self": mark_self,
            "mark_other": mark_other,
            "pptr": pptr,
            "pidx": pidx,
            "has_circle": self.has_circle_marks(),
        }
        self._cache["arrays"] = out
        return out


# -- module-level operations ------------------------------------------


def add_edge(g: MixedGraph, a: int, b: int, mark_at_a: Mark, mark_at_b: Mark) -> MixedGraph:
    """Return a new graph with the edge added; g is unchanged."""
    out = g.copy()
    out._add_edge(a, b, mark_at_a, mark_at_b)
    return out


def from_edges(p: int, edges, labels=None) -> MixedGraph:
    """Build a graph from (a, b, mark_at_a, mark_at_b) tuples."""
    g = MixedGraph(p, labels)
    for a, b, ma, mb in edges:
        g._add_edge(a, b, ma, mb)
    return g


def from_directed_edges(p: int, pairs, labels=None) -> MixedGraph:
    """Build a graph from (parent, child) pairs, all edges directed."""
    return from_edges(p, ((a, b, TAIL, HEAD) for a, b in pairs), labels)


def complete_undirected(p: int) -> MixedGraph:
    g = MixedGraph(p)
    for a in range(p):
        for b in range(a + 1, p):
            g._add_edge(a, b, TAIL, TAIL)
    return g


def ancestors(g: MixedGraph, S) -> set:
    """an(G,S): nodes with a directed path into some s in S, including S."""
    out = set(S)
    stack = list(out)
    while stack:
        v = stack.pop()
        for u in g._adj[v]:
            if u not in out and g._marks[(u, v)] == TAIL and g._marks[(v, u)] == HEAD:
                out.add(u)
                stack.append(u)
    return out


def descendants(g: MixedGraph, S) -> set:
    """de(G,S): nodes reachable by a directed path from some s in S, including S."""
    out = set(S)
    stack = list(out)
    while stack:
        v = stack.pop()
        for u in g._adj[v]:
            if u not in out and g._marks[(v, u)] == TAIL and g._marks[(u, v)] == HEAD:
                out.add(u)
                stack.append(u)
    return out


def is_ancestral(g: MixedGraph) -> AncestralCheck:
    """Check the ancestral-graph conditions.

    Returns a truthy result, or a falsy one carrying the violating cycle or
    triple: no directed cycle, no almost directed cycle (a directed path
    closed by a bidirected edge), and no node of an undirected edge with a
    parent or bidirected edge.
    """
    if g.has_circle_marks():
        raise CircleMarkPresent("graph has circle marks")
    color = [0] * g.p  # 0 unseen, 1 on stack, 2 done
    parent_of = {}

    for root in range(g.p):
        if color[root]:
            continue
        stack = [(root, iter(g.children(root)))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = 2
                stack.pop()
                continue
            if color[nxt] == 1:
                cycle = [nxt, v]
                while cycle[-1] != nxt:
                    cycle.append(parent_of[cycle[-1]])
                    if len(cycle) > g.p + 1:
                        break
                cycle = tuple(reversed(cycle[:-1] if cycle[-1] == nxt else cycle))
                return AncestralCheck(False, "directed_cycle", cycle)
            if color[nxt] == 0:
                parent_of[nxt] = v
                color[nxt] = 1
                stack.append((nxt, iter(g.children(nxt))))

    for e in g.edges():
        if e.mark_at_a == HEAD and e.mark_at_b == HEAD:
            anc_a = ancestors(g, {e.a})
            if e.b in anc_a:
                return AncestralCheck(False, "almost_directed_cycle", (e.b, e.a))
            if e.a in ancestors(g, {e.b}):
                return AncestralCheck(False, "almost_directed_cycle", (e.a, e.b))

    for e in g.edges():
        if e.mark_at_a == TAIL and e.mark_at_b == TAIL:
            for v in (e.a, e.b):
                for u in g._adj[v]:
                    if g._marks[(v, u)] == HEAD:
                        other = e.b if v == e.a else e.a
                        return AncestralCheck(False, "undirected_violation", (other, v, u))

    return AncestralCheck(True, None, None)


def is_dag(g: MixedGraph) -> bool:
    for e in g.edges():
        marks = {e.mark_at_a, e.mark_at_b}
        if marks != {TAIL, HEAD}:
            return False
    return bool(is_ancestral(g))


def graph_class_of(g: MixedGraph) -> GraphClass:
    if g.has_circle_marks():
        return GraphClass.PAG
    if all(e.mark_at_a == TAIL and e.mark_at_b == TAIL for e in g.edges()) and g.edge_count() > 0:
        return GraphClass.UNDIRECTED
    if is_dag(g):
        return GraphClass.DAG
    if g.edge_count() == 0:
        return GraphClass.DAG
    return GraphClass.MAG


def skeleton(g: MixedGraph) -> MixedGraph:
    """Same adjacencies, all marks replaced by tails."""
    out = MixedGraph(g.p, g.labels)
    for e in g.edges():
        out._add_edge(e.a, e.b, TAIL, TAIL)
    return out


def simple_paths(g: MixedGraph, i: int, j: int, cap: Optional[int] = None):
    """Yield all simple paths between i and j (node tuples) of length <= cap.

    Enumeration is DFS over sorted neighbors; with no cap the graph must have
    at most 20 nodes.
    """
    if cap is None:
        if g.p > 20:
            raise GraphTooLarge("uncapped path enumeration needs <= 20 nodes")
        cap = g.p
    if i == j:
        raise ValueError("endpoints must differ")
    path = [i]
    on_path = {i}

    def dfs():
        u = path[-1]
        if len(path) > cap:
            return
        for v in g.neighbors(u):
            if v == j:
                yield tuple(path) + (j,)
                continue
            if v in on_path:
                continue
            if len(path) >= cap:
                continue
            path.append(v)
            on_path.add(v)
            yield from dfs()
            path.pop()
            on_path.discard(v)

    yield from dfs()


def discriminating_paths(g: MixedGraph, i: int, j: int, y: int, cap: Optional[int] = None) -> list:
    """All discriminating paths (i, ..., x, y, j) for y.

    A qualifying path has at least 3 edges, i not adjacent to j, and every
    vertex strictly between i and y a collider on the path and a parent of j.
    """
    if cap is None and g.p > 20:
        raise GraphTooLarge("uncapped path enumeration needs <= 20 nodes")
    cap = cap if cap is not None else g.p
    if g.adjacent(i, j) or not g.adjacent(y, j):
        return []

    def is_parent_of_j(u: int) -> bool:
        return g.adjacent(u, j) and g._marks[(u, j)] == TAIL and g._marks[(j, u)] == HEAD

    results = []
    path = [i]
    on_path = {i}

    def dfs():
        u = path[-1]
        for v in g.neighbors(u):
            if v in on_path or v == j:
                continue
            if len(path) >= 2:
                # extending past u makes u an interior vertex between i and y
                a = path[-2]
                if not (g._marks[(u, a)] == HEAD and g._marks[(u, v)] == HEAD):
                    continue
                if not is_parent_of_j(u):
                    continue
            if v == y:
                if len(path) >= 2:
                    results.append(tuple(path) + (y, j))
                continue
            # interiors must be parents of j, so prune everything else
            if not is_parent_of_j(v):
                continue
            if len(path) + 2 > cap:
                continue
            path.append(v)
            on_path.add(v)
            dfs()
            path.pop()
            on_path.discard(v)

    dfs()
    return sorted(results)


# -- text format -------------------------------------------------------

_LEFT_MARKS = {"<": HEAD, "o": CIRCLE, "-": TAIL}
_RIGHT_MARKS = {">": HEAD, "o": CIRCLE, "-": TAIL}
_LEFT_CHARS = {HEAD: "<", CIRCLE: "o", TAIL: "-"}
_RIGHT_CHARS = {HEAD: ">", CIRCLE: "o", TAIL: "-"}


def serialize_graph(g: MixedGraph) -> str:
    """Render as `p=<count>` plus one `<id> <left>-<right> <id>` line per edge."""
    lines = [f"p={g.p}"]
    for e in g.edges():
        token = f"{_LEFT_CHARS[e.mark_at_a]}-{_RIGHT_CHARS[e.mark_at_b]}"
        lines.append(f"{e.a} {token} {e.b}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> MixedGraph:
    """Parse the edge-list format produced by serialize_graph."""
    declared_p = None
    edges = []
    max_node = -1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("p="):
            try:
                declared_p = int(line[2:])
            except ValueError:
                raise ParseError(f"bad node count {line!r}", line_no)
            if declared_p < 0:
                raise ParseError("node count must be non-negative", line_no)
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected '<id> <marks> <id>', got {line!r}", line_no)
        a_tok, mark_tok, b_tok = parts
        try:
            a, b = int(a_tok), int(b_tok)
        except ValueError:
            raise ParseError(f"node ids must be integers, got {line!r}", line_no)
        if len(mark_tok) != 3 or mark_tok[1] != "-":
            raise ParseError(f"malformed mark token {mark_tok!r}", line_no)
        if mark_tok[0] not in _LEFT_MARKS or mark_tok[2] not in _RIGHT_MARKS:
            raise ParseError(f"malformed mark token {mark_tok!r}", line_no)
        edges.append((a, b, _LEFT_MARKS[mark_tok[0]], _RIGHT_MARKS[mark_tok[2]]))
        max_node = max(max_node, a, b)
    p = declared_p if declared_p is not None else max_node + 1
    if max_node >= p:
        raise ParseError(f"edge mentions node {max_node} but p={p}")
    g = MixedGraph(p)
    for a, b, ma, mb in edges:
        g._add_edge(a, b, ma, mb)
    return g
