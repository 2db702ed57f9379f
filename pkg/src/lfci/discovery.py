"""Level-wise skeleton search over pluggable candidate pools, orientation
rules for partial ancestral graphs (with a local-graph variant of the
discriminating-path rule), and the four pipelines built on them: the local
search, its Markov-blanket warm start, FCI, and PC baselines."""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    GraphTooLarge,
    InconsistentSeparators,
    SingularAfterRidge,
    TesterFailure,
)
from .mixed_graph import (
    CIRCLE,
    HEAD,
    TAIL,
    MixedGraph,
    complete_undirected,
    discriminating_paths,
    from_edges,
)
from .separation import UNBOUNDED, local_graph, m_separated

_FCI_NODE_GUARD = 40


# -- candidate pools ----------------------------------------------------


@dataclass(frozen=True)
class Gamma:
    """Distance pool: nodes k with d(i,k) + d(j,k) <= gamma in the level
    snapshot minus the edge (i,j)."""

    gamma: int

    def __post_init__(self):
        if self.gamma < 1:
            raise ConfigError("gamma must be at least 1")


@dataclass(frozen=True)
class Neighborhood:
    """Union of the adjacency sets of both endpoints."""


@dataclass(frozen=True)
class PossibleDsep:
    """Possible-D-SEP of the first endpoint; a frozen per-node map may be
    supplied so pools stay fixed across a whole search phase."""

    frozen: dict = None


@dataclass(frozen=True)
class AllNodes:
    """Every node except the endpoints."""


@dataclass
class SkeletonState:
    """Working graph C, the snapshot C_old taken at level start, and (lazy)
    all-pairs hop distances on the snapshot."""

    C: MixedGraph
    C_old: MixedGraph
    _dist: np.ndarray = field(default=None, repr=False)

    @property
    def distances(self):
        if self._dist is None:
            p = self.C_old.p
            d = np.full((p, p), p, dtype=np.int32)
            for src in range(p):
                d[src] = _hop_distances(self.C_old, src, p)
            self._dist = d
        return self._dist


def _hop_distances(g, src, cap, banned=None):
    """BFS hop distances from src, cut off beyond cap; values above cap
    mean unreachable.  ``banned`` suppresses one undirected edge."""
    far = cap + 1
    dist = [far] * g.p
    dist[src] = 0
    frontier = [src]
    d = 0
    while frontier and d < cap:
        nxt = []
        for v in frontier:
            for w in g.neighbors(v):
                if banned is not None and {v, w} == banned:
                    continue
                if dist[w] > d + 1:
                    dist[w] = d + 1
                    nxt.append(w)
        frontier = nxt
        d += 1
    return dist


def possible_d_sep(g, i, j=None):
    """Nodes reachable from i by a path on which every interior triple is a
    collider or spans a triangle; endpoints excluded."""
    reached = set()
    seen = set()
    stack = []
    for v in g.neighbors(i):
        stack.append((i, v))
        seen.add((i, v))
    while stack:
        a, b = stack.pop()
        reached.add(b)
        for c in g.neighbors(b):
            if c == a or c == i:
                continue
            collider = g.mark_at(b, a) == HEAD and g.mark_at(b, c) == HEAD
            if not collider and not g.adjacent(a, c):
                continue
            if (b, c) not in seen:
                seen.add((b, c))
                stack.append((b, c))
    reached.discard(i)
    if j is not None:
        reached.discard(j)
    return reached


def pool(strategy, state, i, j):
    """Candidate separator pool for the ordered pair (i, j)."""
    if isinstance(strategy, Gamma):
        cap = strategy.gamma
        di = _hop_distances(state.C_old, i, cap, banned={i, j})
        dj = _hop_distances(state.C_old, j, cap, banned={i, j})
        return {
            k
            for k in range(state.C_old.p)
            if k != i and k != j and di[k] + dj[k] <= cap
        }
    if isinstance(strategy, Neighborhood):
        out = set(state.C.neighbors(i)) | set(state.C.neighbors(j))
        out.discard(i)
        out.discard(j)
        return out
    if isinstance(strategy, PossibleDsep):
        if strategy.frozen is not None:
            out = set(strategy.frozen.get(i, ()))
        else:
            out = possible_d_sep(state.C, i)
        out.discard(i)
        out.discard(j)
        return out
    if isinstance(strategy, AllNodes):
        return set(range(state.C.p)) - {i, j}
    raise ConfigError(f"unknown pool strategy {strategy!r}")


# -- level-wise skeleton search -----------------------------------------


@dataclass
class RunStats:
    n_tests: int = 0
    m_reach: int = 0
    edges_removed_per_level: list = field(default_factory=list)


def _pair_key(i, j):
    return (i, j) if i < j else (j, i)


def _check_undirected(g, what):
    for e in g.edges():
        if e.mark_at_a != TAIL or e.mark_at_b != TAIL:
            raise ConfigError(f"{what} must be an undirected graph")


def _first_independent(tester, i, j, subsets):
    """Index of the first accepted subset, via the tester's batch entry
    point when it has one."""
    fast = getattr(tester, "first_independent", None)
    if fast is not None:
        return fast(i, j, subsets)
    for r, s in enumerate(subsets):
        if tester.decide(i, j, set(s)):
            return r
    return -1


def skeleton_search(tester, p, strategy, eta=UNBOUNDED, initial=None,
                    level_batch=False):
    """Remove edges level by level, testing subsets of per-pair pools.

    At level l, every ordered pair (i, j) adjacent at level start is scanned
    in lexicographic order and its pool subsets of size l are tested in
    lexicographic order over sorted pool nodes; the first accepted subset
    deletes the edge and is recorded.  Pools are always computed against the
    level-start snapshot, so removals within a level do not influence
    decisions and the output is independent of scan order.  In sequential
    mode (default) deletions apply immediately and already-deleted pairs are
    skipped; in level_batch mode every level-start pair is decided against
    the snapshot and deletions are merged at level end.  Both modes return
    identical skeletons, separator records, and m_reach.

    Returns (skeleton, separator record, run stats).
    """
    if initial is None:
        c = complete_undirected(p)
    else:
        if initial.p != p:
            raise ConfigError(f"initial graph has {initial.p} nodes, want {p}")
        _check_undirected(initial, "initial graph")
        c = initial.copy()
    c_old = c.copy()
    sep = {}
    stats = RunStats()
    start_count = getattr(tester, "n_tests", 0)

    ell = 0
    while True:
        if eta is not UNBOUNDED and ell > eta:
            break
        if c.edge_count() == 0:
            break
        # C equals C_old at level start, so pools computed here both see
        # the snapshot and depend only on it
        state = SkeletonState(C=c, C_old=c_old)
        ordered = [
            (i, j)
            for i in range(p)
            for j in c_old.neighbors(i)
        ]
        pools = {}
        if ell > 0:
            pools = {
                (i, j): sorted(pool(strategy, state, i, j))
                for (i, j) in ordered
            }
            # no further removals are possible once no pool can supply
            # subsets of the current size: pools only shrink with C_old
            if all(len(pools[o]) < ell for o in ordered):
                break

        removed_this_level = 0
        pending = {}
        for i, j in ordered:
            if not level_batch and not c.adjacent(i, j):
                continue
            cand = pools.get((i, j), ())
            if ell == 0:
                subsets = [()]
            else:
                if len(cand) < ell:
                    continue
                subsets = list(itertools.combinations(cand, ell))
            try:
                hit = _first_independent(tester, i, j, subsets)
            except Exception as exc:
                stats.n_tests = getattr(tester, "n_tests", 0) - start_count
                raise TesterFailure(
                    f"tester failed on pair ({i}, {j}) at level {ell}: {exc}",
                    query=(i, j, ell),
                ) from exc
            if hit < 0:
                continue
            found = set(subsets[hit])
            if level_batch:
                pending.setdefault(_pair_key(i, j), found)
            else:
                c._remove_edge(i, j)
                sep[_pair_key(i, j)] = found
                stats.m_reach = max(stats.m_reach, ell)
                removed_this_level += 1
        if level_batch:
            for key, found in pending.items():
                c._remove_edge(*key)
                sep[key] = found
                stats.m_reach = max(stats.m_reach, ell)
                removed_this_level += 1
        stats.edges_removed_per_level.append(removed_this_level)
        c_old = c.copy()
        ell += 1

    stats.n_tests = getattr(tester, "n_tests", 0) - start_count
    return c, sep, stats


# -- orientation --------------------------------------------------------


@dataclass(frozen=True)
class Fci:
    """Plain discriminating-path rule using recorded separators."""


@dataclass(frozen=True)
class LfciLocal:
    """Local variant: a discriminating path only certifies a bidirected
    triple when it stays inside the gamma-local graph of its endpoints;
    otherwise only the far arrowhead is placed."""

    gamma: int


def _orient_mark(g, at, other, mark, rule):
    cur = g.mark_at(at, other)
    if cur == mark:
        return False
    if cur != CIRCLE:
        raise InconsistentSeparators(
            f"rule {rule} wants {mark.name} at {at} on edge "
            f"({at},{other}) but it is already {cur.name}"
        )
    g._set_mark(at, other, mark)
    return True


def _apply_r0(g, sep):
    """v-structures: unshielded i*-*b*-*k with b outside SEP(i,k) gets
    arrowheads at b.  Only heads are placed, so R0 cannot conflict."""
    for b in range(g.p):
        nbrs = g.neighbors(b)
        for a, c in itertools.combinations(nbrs, 2):
            if g.adjacent(a, c):
                continue
            rec = sep.get(_pair_key(a, c))
            if rec is None or b in rec:
                continue
            _orient_mark(g, b, a, HEAD, "R0")
            _orient_mark(g, b, c, HEAD, "R0")


def _rule_r1(g):
    """R1 (Zhang 2008): a*->b o-* c with a,c non-adjacent => b -> c."""
    changed = False
    for b in range(g.p):
        for a in g.neighbors(b):
            if g.mark_at(b, a) != HEAD:
                continue
            for c in g.neighbors(b):
                if c == a or g.adjacent(a, c):
                    continue
                if g.mark_at(b, c) != CIRCLE:
                    continue
                changed |= _orient_mark(g, b, c, TAIL, "R1")
                changed |= _orient_mark(g, c, b, HEAD, "R1")
    return changed


def _rule_r2(g):
    """R2: a -> b *-> c or a *-> b -> c, and a *-o c => a *-> c."""
    changed = False
    for a in range(g.p):
        for c in g.neighbors(a):
            if g.mark_at(c, a) != CIRCLE:
                continue
            for b in g.neighbors(a):
                if b == c or not g.adjacent(b, c):
                    continue
                first = (
                    g.mark_at(a, b) == TAIL
                    and g.mark_at(b, a) == HEAD
                    and g.mark_at(c, b) == HEAD
                )
                second = (
                    g.mark_at(b, a) == HEAD
                    and g.mark_at(b, c) == TAIL
                    and g.mark_at(c, b) == HEAD
                )
                if first or second:
                    changed |= _orient_mark(g, c, a, HEAD, "R2")
                    break
    return changed


def _rule_r3(g):
    """R3: a *-> b <-* c, a *-o d o-* c, a,c non-adjacent, d *-o b
    => d *-> b."""
    changed = False
    for b in range(g.p):
        for d in g.neighbors(b):
            if g.mark_at(b, d) != CIRCLE:
                continue
            nbrs = [
                v
                for v in g.neighbors(b)
                if v != d and g.mark_at(b, v) == HEAD
            ]
            fired = False
            for a, c in itertools.combinations(nbrs, 2):
                if g.adjacent(a, c):
                    continue
                if not (g.adjacent(d, a) and g.adjacent(d, c)):
                    continue
                if g.mark_at(d, a) == CIRCLE and g.mark_at(d, c) == CIRCLE:
                    changed |= _orient_mark(g, b, d, HEAD, "R3")
                    fired = True
                    break
            if fired:
                continue
    return changed


def _rule_r4(g, sep, mode, local_nodes):
    """R4: for a discriminating path <theta, ..., x, y, j> for y with a
    circle at y on (y, j): y in SEP(theta, j) => y -> j; otherwise the
    triple becomes x <-> y <-> j.  The local mode only certifies the
    bidirected triple when some discriminating path lies inside the
    local graph of (theta, j); failing that it places just the
    arrowhead at j."""
    changed = False
    for y in range(g.p):
        for j in g.neighbors(y):
            if g.mark_at(y, j) != CIRCLE:
                continue
            paths = []
            for theta in range(g.p):
                if theta in (y, j) or g.adjacent(theta, j):
                    continue
                paths.extend(discriminating_paths(g, theta, j, y, cap=g.p))
            paths.sort(key=lambda t: (len(t), t))
            saw_uncertified = False
            for path in paths:
                theta = path[0]
                rec = sep.get(_pair_key(theta, j))
                if rec is None:
                    continue
                x = path[-3]
                if y in rec:
                    changed |= _orient_mark(g, y, j, TAIL, "R4")
                    changed |= _orient_mark(g, j, y, HEAD, "R4")
                    saw_uncertified = False
                    break
                if isinstance(mode, Fci) or set(path) <= local_nodes(theta, j):
                    changed |= _orient_mark(g, x, y, HEAD, "R4")
                    changed |= _orient_mark(g, y, x, HEAD, "R4")
                    changed |= _orient_mark(g, y, j, HEAD, "R4")
                    changed |= _orient_mark(g, j, y, HEAD, "R4")
                    saw_uncertified = False
                    break
                saw_uncertified = True
            if saw_uncertified:
                # no path stayed local: place only the far arrowhead
                changed |= _orient_mark(g, j, y, HEAD, "R4")
    return changed


def _is_uncovered(g, path):
    return all(
        not g.adjacent(path[k - 1], path[k + 1])
        for k in range(1, len(path) - 1)
    )


def _rule_r5(g):
    """R5: a o-o b with an uncovered all-circle path <a, c, ..., d, b>,
    a,d and b,c non-adjacent => the edge and the whole path become
    undirected."""
    changed = False
    for a in range(g.p):
        for b in g.neighbors(a):
            if b < a:
                continue
            if g.mark_at(a, b) != CIRCLE or g.mark_at(b, a) != CIRCLE:
                continue
            path = _find_circle_path(g, a, b)
            if path is None:
                continue
            changed |= _orient_mark(g, a, b, TAIL, "R5")
            changed |= _orient_mark(g, b, a, TAIL, "R5")
            for k in range(len(path) - 1):
                changed |= _orient_mark(g, path[k], path[k + 1], TAIL, "R5")
                changed |= _orient_mark(g, path[k + 1], path[k], TAIL, "R5")
    return changed


def _find_circle_path(g, a, b):
    """First (by DFS over sorted neighbors) uncovered all-circle path
    <a, c, ..., d, b> with a,d and b,c non-adjacent, length >= 3 edges."""

    def circle_edge(u, v):
        return g.mark_at(u, v) == CIRCLE and g.mark_at(v, u) == CIRCLE

    path = [a]
    on_path = {a}

    def dfs():
        u = path[-1]
        for v in sorted(g.neighbors(u)):
            if v in on_path or not circle_edge(u, v):
                continue
            if len(path) >= 2 and g.adjacent(path[-2], v):
                continue  # keep the path uncovered
            if v == b:
                if len(path) < 3:
                    continue
                if g.adjacent(a, path[-1]) or g.adjacent(b, path[1]):
                    continue
                return path + [b]
            path.append(v)
            on_path.add(v)
            out = dfs()
            path.pop()
            on_path.discard(v)
            if out is not None:
                return out
        return None

    return dfs()


def _rule_r6(g):
    """R6: a --- b o-* c (a != c) => tail at b on (b, c)."""
    changed = False
    for b in range(g.p):
        tails = [
            a
            for a in g.neighbors(b)
            if g.mark_at(b, a) == TAIL and g.mark_at(a, b) == TAIL
        ]
        if not tails:
            continue
        for c in g.neighbors(b):
            if g.mark_at(b, c) != CIRCLE:
                continue
            if any(a != c for a in tails):
                changed |= _orient_mark(g, b, c, TAIL, "R6")
    return changed


def _rule_r7(g):
    """R7: a --o b o-* c with a,c non-adjacent => tail at b on (b, c)."""
    changed = False
    for b in range(g.p):
        for a in g.neighbors(b):
            if g.mark_at(a, b) != TAIL or g.mark_at(b, a) != CIRCLE:
                continue
            for c in g.neighbors(b):
                if c == a or g.adjacent(a, c):
                    continue
                if g.mark_at(b, c) == CIRCLE:
                    changed |= _orient_mark(g, b, c, TAIL, "R7")
    return changed


def _rule_r8(g):
    """R8: a -> b -> c or a --o b -> c, with a o-> c => a -> c."""
    changed = False
    for a in range(g.p):
        for c in g.neighbors(a):
            if g.mark_at(a, c) != CIRCLE or g.mark_at(c, a) != HEAD:
                continue
            for b in g.neighbors(a):
                if b == c or not g.adjacent(b, c):
                    continue
                b_to_c = g.mark_at(b, c) == TAIL and g.mark_at(c, b) == HEAD
                if not b_to_c:
                    continue
                a_to_b = g.mark_at(a, b) == TAIL and g.mark_at(b, a) == HEAD
                a_circ_b = (
                    g.mark_at(a, b) == TAIL and g.mark_at(b, a) == CIRCLE
                )
                if a_to_b or a_circ_b:
                    changed |= _orient_mark(g, a, c, TAIL, "R8")
                    break
    return changed


def _pd_edge(g, u, v):
    """Edge u to v is potentially directed: no arrowhead back at u, no tail
    at v."""
    return g.mark_at(u, v) != HEAD and g.mark_at(v, u) != TAIL


def _uncovered_pd_path_exists(g, a, first, target, avoid_adjacent=None):
    """Uncovered potentially-directed path a, first, ..., target."""
    if avoid_adjacent is not None and g.adjacent(first, avoid_adjacent):
        return False
    if not _pd_edge(g, a, first):
        return False
    if first == target:
        return True
    path = [a, first]
    on_path = {a, first}

    def dfs():
        u = path[-1]
        for v in sorted(g.neighbors(u)):
            if v in on_path or not _pd_edge(g, u, v):
                continue
            if g.adjacent(path[-2], v):
                continue
            if v == target:
                return True
            path.append(v)
            on_path.add(v)
            hit = dfs()
            path.pop()
            on_path.discard(v)
            if hit:
                return True
        return False

    return dfs()


def _rule_r9(g):
    """R9: a o-> c with an uncovered potentially directed path
    <a, b, ..., c>, b,c non-adjacent => a -> c."""
    changed = False
    for a in range(g.p):
        for c in g.neighbors(a):
            if g.mark_at(a, c) != CIRCLE or g.mark_at(c, a) != HEAD:
                continue
            fired = False
            for first in sorted(g.neighbors(a)):
                if first == c or g.adjacent(first, c):
                    continue
                if _uncovered_pd_path_exists(g, a, first, c):
                    changed |= _orient_mark(g, a, c, TAIL, "R9")
                    fired = True
                    break
            if fired:
                continue
    return changed


def _rule_r10(g):
    """R10: a o-> c, b -> c <- d, uncovered potentially directed paths
    from a to b and from a to d whose first edges diverge at
    non-adjacent vertices => a -> c."""
    changed = False
    for a in range(g.p):
        for c in g.neighbors(a):
            if g.mark_at(a, c) != CIRCLE or g.mark_at(c, a) != HEAD:
                continue
            into_c = [
                b
                for b in g.neighbors(c)
                if b != a
                and g.mark_at(b, c) == TAIL
                and g.mark_at(c, b) == HEAD
            ]
            fired = False
            for b, d in itertools.permutations(into_c, 2):
                firsts_b = [
                    x
                    for x in sorted(g.neighbors(a))
                    if x != c and _uncovered_pd_path_exists(g, a, x, b)
                ]
                firsts_d = [
                    y
                    for y in sorted(g.neighbors(a))
                    if y != c and _uncovered_pd_path_exists(g, a, y, d)
                ]
                for x in firsts_b:
                    for y in firsts_d:
                        if x != y and not g.adjacent(x, y):
                            changed |= _orient_mark(g, a, c, TAIL, "R10")
                            fired = True
                            break
                    if fired:
                        break
                if fired:
                    break
            if fired:
                continue
    return changed


def orient(skel, sep, mode, graph_for_local=None):
    """Orient an undirected skeleton into a PAG using recorded separators.

    All marks start as circles; R0 places v-structure heads; rules 1-4,
    then 5-7, then 8-10 run to fixed points in that order.  The mode picks
    the discriminating-path handling: Fci applies the plain rule, LfciLocal
    demands the path stay inside the gamma-local graph (of graph_for_local,
    default the skeleton itself) before certifying a bidirected triple.
    """
    g = MixedGraph(skel.p, skel.labels)
    for e in skel.edges():
        g._add_edge(e.a, e.b, CIRCLE, CIRCLE)

    base = graph_for_local if graph_for_local is not None else skel
    cache = {}

    def local_nodes(i, j):
        key = _pair_key(i, j)
        if key not in cache:
            gamma = mode.gamma if isinstance(mode, LfciLocal) else None
            cache[key] = local_graph(base, key[0], key[1], gamma).node_subset
        return cache[key]

    _apply_r0(g, sep)
    stages = (
        (
            _rule_r1,
            _rule_r2,
            _rule_r3,
            lambda gg: _rule_r4(gg, sep, mode, local_nodes),
        ),
        (_rule_r5, _rule_r6, _rule_r7),
        (_rule_r8, _rule_r9, _rule_r10),
    )
    again = True
    while again:
        again = False
        for stage in stages:
            changed = True
            while changed:
                changed = False
                for rule in stage:
                    changed |= rule(g)
                again |= changed
    return g


# -- Meek rules for the PC baselines ------------------------------------


def _meek_directed(g, a, b):
    # v-structure orientation leaves a circle at the tail end, so a
    # directed edge here is "head at b, no head at a"
    return g.mark_at(b, a) == HEAD and g.mark_at(a, b) != HEAD


def _meek_undirected(g, a, b):
    return g.mark_at(a, b) != HEAD and g.mark_at(b, a) != HEAD


def _meek_r1(g):
    """Meek R1: a -> b - c with a,c non-adjacent => b -> c."""
    changed = False
    for b in range(g.p):
        for a in g.neighbors(b):
            if not _meek_directed(g, a, b):
                continue
            for c in g.neighbors(b):
                if c == a or g.adjacent(a, c):
                    continue
                if _meek_undirected(g, b, c):
                    changed |= _orient_mark(g, b, c, TAIL, "MeekR1")
                    changed |= _orient_mark(g, c, b, HEAD, "MeekR1")
    return changed


def _meek_r2(g):
    """Meek R2: a -> b -> c with a - c => a -> c."""
    changed = False
    for a in range(g.p):
        for c in g.neighbors(a):
            if not _meek_undirected(g, a, c):
                continue
            for b in g.neighbors(a):
                if b == c or not g.adjacent(b, c):
                    continue
                if _meek_directed(g, a, b) and _meek_directed(g, b, c):
                    changed |= _orient_mark(g, a, c, TAIL, "MeekR2")
                    changed |= _orient_mark(g, c, a, HEAD, "MeekR2")
                    break
    return changed


def _meek_r3(g):
    """Meek R3: a - b, a - c, a - d, c -> b, d -> b, c,d non-adjacent
    => a -> b."""
    changed = False
    for a in range(g.p):
        for b in g.neighbors(a):
            if not _meek_undirected(g, a, b):
                continue
            spouses = [
                v
                for v in g.neighbors(a)
                if v != b
                and _meek_undirected(g, a, v)
                and g.adjacent(v, b)
                and _meek_directed(g, v, b)
            ]
            fired = False
            for c, d in itertools.combinations(spouses, 2):
                if not g.adjacent(c, d):
                    changed |= _orient_mark(g, a, b, TAIL, "MeekR3")
                    changed |= _orient_mark(g, b, a, HEAD, "MeekR3")
                    fired = True
                    break
            if fired:
                continue
    return changed


def _orient_cpdag(skel, sep):
    g = MixedGraph(skel.p, skel.labels)
    for e in skel.edges():
        g._add_edge(e.a, e.b, CIRCLE, CIRCLE)
    _apply_r0(g, sep)
    changed = True
    while changed:
        changed = False
        for rule in (_meek_r1, _meek_r2, _meek_r3):
            changed |= rule(g)
    for (u, v), mark in list(g._marks.items()):
        if mark == CIRCLE:
            g._set_mark(u, v, TAIL)
    return g


# -- pipelines -----------------------------------------------------------


def lfci(tester, p, eta, gamma, level_batch=False):
    """Bounded local search: Gamma pools up to level eta, then orientation
    with the local discriminating-path rule."""
    if eta is not UNBOUNDED and eta < 0:
        raise ConfigError("eta must be non-negative")
    skel, sep, stats = skeleton_search(
        tester, p, Gamma(gamma), eta=eta, level_batch=level_batch
    )
    pag = orient(skel, sep, LfciLocal(gamma))
    return pag, sep, stats


def lfci_mb(tester, p, eta, gamma, moral, level_batch=False):
    """Local search warm-started from a moral graph; levels 0..eta-1.

    The reduced level cap eta-1 suffices because blanket-adjacent pairs
    admit separators one smaller than the general bound.  Level 0 must
    still run: a pair joined only by collider paths is blanket-adjacent
    yet marginally independent (e.g. two parentless co-parents), and the
    empty set can be its sole separator.

    Pairs non-adjacent in the moral graph are never tested; for orientation
    they fall back to the union of the endpoints' moral neighborhoods,
    which contains every non-collider the rules may ask about.
    """
    if moral.p != p:
        raise ConfigError(f"moral graph has {moral.p} nodes, want {p}")
    _check_undirected(moral, "moral graph")
    skel, sep, stats = skeleton_search(
        tester,
        p,
        Gamma(gamma),
        eta=eta - 1,
        initial=moral,
        level_batch=level_batch,
    )
    orient_sep = dict(sep)
    for i in range(p):
        for j in range(i + 1, p):
            if moral.adjacent(i, j) or (i, j) in orient_sep:
                continue
            fallback = set(moral.neighbors(i)) | set(moral.neighbors(j))
            fallback -= {i, j}
            orient_sep[(i, j)] = fallback
    pag = orient(skel, orient_sep, LfciLocal(gamma))
    return pag, sep, stats


def fci_skeleton(tester, p, allow_large=False, level_batch=False):
    """Skeleton phases of fci: neighborhood-pool search, then possible-D-SEP
    retesting seeded by the v-structures of the first pass.  Split out so
    skeleton-quality sweeps can run on noisy testers without the orientation
    phase, which may reject inconsistent separator records."""
    if p > _FCI_NODE_GUARD and not allow_large:
        raise GraphTooLarge(
            f"possible-D-SEP retesting is exponential; pass allow_large "
            f"to run with p={p} > {_FCI_NODE_GUARD}"
        )
    skel1, sep1, stats1 = skeleton_search(
        tester, p, Neighborhood(), eta=UNBOUNDED, level_batch=level_batch
    )
    pre = MixedGraph(skel1.p, skel1.labels)
    for e in skel1.edges():
        pre._add_edge(e.a, e.b, CIRCLE, CIRCLE)
    _apply_r0(pre, sep1)
    frozen = {v: possible_d_sep(pre, v) for v in range(p)}
    skel2, sep2, stats2 = skeleton_search(
        tester,
        p,
        PossibleDsep(frozen=frozen),
        eta=UNBOUNDED,
        initial=skel1,
        level_batch=level_batch,
    )
    sep = dict(sep1)
    sep.update(sep2)
    stats = RunStats(
        n_tests=stats1.n_tests + stats2.n_tests,
        m_reach=max(stats1.m_reach, stats2.m_reach),
        edges_removed_per_level=(
            stats1.edges_removed_per_level + stats2.edges_removed_per_level
        ),
    )
    return skel2, sep, stats


def fci(tester, p, allow_large=False, level_batch=False):
    """Reference two-phase search with possible-D-SEP retesting and the
    plain discriminating-path rule."""
    skel, sep, stats = fci_skeleton(
        tester, p, allow_large=allow_large, level_batch=level_batch
    )
    pag = orient(skel, sep, Fci())
    return pag, sep, stats


@dataclass(frozen=True)
class Standard:
    """Classic neighborhood-pool search, unbounded level."""


@dataclass(frozen=True)
class Reduced:
    """Whole-vertex-set pools truncated at a fixed level."""

    eta: int

    def __post_init__(self):
        if self.eta < 0:
            raise ConfigError("eta must be non-negative")


def pc(tester, p, variant, level_batch=False):
    """PC baseline: skeleton search plus v-structures and Meek's rules,
    returning a partially directed graph with plain tails on unoriented
    edges."""
    if isinstance(variant, Standard):
        skel, sep, stats = skeleton_search(
            tester, p, Neighborhood(), eta=UNBOUNDED, level_batch=level_batch
        )
    elif isinstance(variant, Reduced):
        skel, sep, stats = skeleton_search(
            tester, p, AllNodes(), eta=variant.eta, level_batch=level_batch
        )
    else:
        raise ConfigError(f"unknown pc variant {variant!r}")
    cpdag = _orient_cpdag(skel, sep)
    return cpdag, sep, stats


def estimate_moral_graph(est, ridge, tau):
    """Support of the (ridge-regularized) inverse covariance, thresholded
    relative to the diagonal."""
    sig = np.asarray(est.sigma_hat, dtype=np.float64)
    p = sig.shape[0]
    try:
        theta = np.linalg.inv(sig + ridge * np.eye(p))
    except np.linalg.LinAlgError as exc:
        raise SingularAfterRidge(
            f"covariance not invertible after ridge {ridge}"
        ) from exc
    theta = 0.5 * (theta + theta.T)
    d = np.diag(theta)
    if np.any(d <= 0):
        raise SingularAfterRidge(
            "inverse covariance has non-positive diagonal"
        )
    scale = np.sqrt(np.outer(d, d))
    edges = [
        (i, j, TAIL, TAIL)
        for i in range(p)
        for j in range(i + 1, p)
        if abs(theta[i, j]) > tau * scale[i, j]
    ]
    return from_edges(p, edges)


class LocalSeparationOracle:
    """Decides queries by m-separation inside the gamma-local graph of the
    queried pair, taken on a fixed reference graph."""

    def __init__(self, graph, gamma):
        self.graph = graph
        self.gamma = gamma
        self.n_tests = 0
        self._cache = {}

    def _local(self, i, j):
        key = _pair_key(i, j)
        out = self._cache.get(key)
        if out is None:
            out = local_graph(self.graph, key[0], key[1], self.gamma)
            self._cache[key] = out
        return out

    def decide(self, i, j, s):
        self.n_tests += 1
        lg = self._local(i, j)
        s_local = set(s) & (lg.node_subset - {i, j})
        return bool(m_separated(lg.induced, i, j, s_local))

    def first_independent(self, i, j, subsets):
        for r, s in enumerate(subsets):
            if self.decide(i, j, set(s)):
                return r
        return -1
