"""Latent projection of DAGs onto MAGs over the observed margin, the
maximally informative PAG construction, and a brute-force verifier for
projected representations."""

import itertools
from dataclasses import dataclass

from .errors import GraphTooLarge, InvalidMag, NotADag
from .mixed_graph import (
    HEAD,
    TAIL,
    MixedGraph,
    ancestors,
    from_edges,
    is_ancestral,
    is_dag,
    skeleton,
)
from .separation import d_sep, m_separated

_PROJECT_LIMIT = 20
_VERIFY_LIMIT = 15


@dataclass(frozen=True)
class Partition:
    """Disjoint split of a DAG's nodes into observed, latent, and selection
    sets.  Observed must be non-empty and the three sets must cover all
    nodes."""

    observed: frozenset
    latent: frozenset
    selection: frozenset

    def __post_init__(self):
        object.__setattr__(self, "observed", frozenset(self.observed))
        object.__setattr__(self, "latent", frozenset(self.latent))
        object.__setattr__(self, "selection", frozenset(self.selection))
        if not self.observed:
            raise ValueError("observed set must be non-empty")
        if (
            self.observed & self.latent
            or self.observed & self.selection
            or self.latent & self.selection
        ):
            raise ValueError("partition sets must be disjoint")

    def check_covers(self, p):
        if self.observed | self.latent | self.selection != set(range(p)):
            raise ValueError(f"partition must cover all {p} nodes")


def _project(dag, part):
    """MAG over the observed margin; marks reindexed to sorted observed order.

    Adjacency between observed i,j holds iff no Y subset of the observed
    (plus selection) separates them; this is decided with the single
    canonical candidate Y* = an({i,j} u Z) n X \\ {i,j}, which separates the
    pair whenever any subset does.  The mark at j is a head iff j is not an
    ancestor of {i} u Z.
    """
    part.check_covers(dag.p)
    obs = sorted(part.observed)
    z = set(part.selection)
    idx = {v: k for k, v in enumerate(obs)}
    anc_cache = {v: ancestors(dag, {v} | z) for v in obs}
    anc_z = ancestors(dag, z) if z else set()

    edges = []
    for i, j in itertools.combinations(obs, 2):
        pool = (anc_cache[i] | anc_cache[j] | anc_z) & part.observed - {i, j}
        if m_separated(dag, i, j, pool | z):
            continue
        mark_j = HEAD if j not in anc_cache[i] else TAIL
        mark_i = HEAD if i not in anc_cache[j] else TAIL
        edges.append((idx[i], idx[j], mark_i, mark_j))
    labels = None if dag.labels is None else [dag.labels[v] for v in obs]
    return from_edges(len(obs), edges, labels=labels)


def latent_project(dag, part):
    """Project a DAG onto the MAG over its observed nodes.

    The result preserves all m-separation statements among observed nodes
    given observed sets plus the selection set, and passes is_ancestral and
    is_maximal.
    """
    if not is_dag(dag):
        raise NotADag("latent projection requires a DAG input")
    if dag.p > _PROJECT_LIMIT:
        raise GraphTooLarge(
            f"latent_project limited to {_PROJECT_LIMIT} nodes; "
            "instance generators use the unchecked construction"
        )
    return _project(dag, part)


def project_unchecked(dag, part):
    """Size-ungated projection for instance generation at benchmark scale."""
    if not is_dag(dag):
        raise NotADag("latent projection requires a DAG input")
    return _project(dag, part)


def mag_sep_record(mag):
    """D-SEP separator for every non-adjacent pair of a maximal ancestral
    graph; raises InvalidMag when some pair cannot be separated."""
    sep = {}
    for i in range(mag.p):
        for j in range(i + 1, mag.p):
            if mag.adjacent(i, j):
                continue
            s = d_sep(mag, i, j)
            if not m_separated(mag, i, j, s):
                s = d_sep(mag, j, i)
                if not m_separated(mag, i, j, s):
                    raise InvalidMag(
                        f"pair ({i},{j}) is non-adjacent but not separable"
                    )
            sep[(i, j)] = s
    return sep


def true_pag(mag):
    """Maximally informative PAG of a MAG: full skeleton, D-SEP separators,
    and the complete orientation rule set with the unmodified
    discriminating-path rule."""
    from .discovery import Fci, orient

    check = is_ancestral(mag)
    if not check:
        raise InvalidMag(f"input is not ancestral: {check.kind} {check.witness}")
    sep = mag_sep_record(mag)
    return orient(skeleton(mag), sep, Fci())


def verify_pag(pag, dag, part):
    """Brute-force check that ``pag`` is a valid projected representation of
    the DAG: edge absence must coincide with separability by some observed
    set (plus selection), arrowheads must point at non-ancestors, and tails
    at ancestors."""
    if dag.p > _VERIFY_LIMIT:
        raise GraphTooLarge(f"verify_pag limited to {_VERIFY_LIMIT} nodes")
    part.check_covers(dag.p)
    obs = sorted(part.observed)
    if pag.p != len(obs):
        return False
    z = set(part.selection)
    for ki, kj in itertools.combinations(range(len(obs)), 2):
        i, j = obs[ki], obs[kj]
        rest = [v for v in obs if v != i and v != j]
        separable = False
        for r in range(len(rest) + 1):
            for y in itertools.combinations(rest, r):
                if m_separated(dag, i, j, set(y) | z):
                    separable = True
                    break
            if separable:
                break
        if pag.adjacent(ki, kj) == separable:
            return False
        if not pag.adjacent(ki, kj):
            continue
        for a, b, ka, kb in ((i, j, ki, kj), (j, i, kj, ki)):
            mark_b = pag.mark_at(kb, ka)
            b_is_anc = b in ancestors(dag, {a} | z)
            if mark_b == HEAD and b_is_anc:
                return False
            if mark_b == TAIL and not b_is_anc:
                return False
    return True
