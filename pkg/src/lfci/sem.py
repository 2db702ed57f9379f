"""Linear Gaussian structural equation models over mixed graphs: parameter
generation, exact and short-trek covariances, sampling, and the trek-system
expansion of covariance-submatrix determinants."""

import csv
import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    CircleMarkPresent,
    GraphTooLarge,
    NotPositiveDefinite,
    SingularSystem,
    SizeMismatch,
    UnsupportedEdge,
    ZeroVariance,
)
from .mixed_graph import (
    CIRCLE,
    HEAD,
    TAIL,
    MixedGraph,
    parse_graph,
    serialize_graph,
)
from .separation import SeparatorQuery, local_graph, m_separated

_TREK_LIMIT = 10


@dataclass(frozen=True)
class SemModel:
    """Linear SEM W = B W + eps with Cov(eps) = Omega.

    B[i, j] is the coefficient on edge j -> i; Omega is symmetric positive
    definite with off-diagonal support on the bidirected part (plus an
    inverse-support block on any undirected part).
    """

    graph: MixedGraph = field(repr=False)
    B: np.ndarray = field(repr=False)
    Omega: np.ndarray = field(repr=False)

    @property
    def p(self):
        return self.graph.p


def _is_pd(a):
    try:
        np.linalg.cholesky(a)
        return True
    except np.linalg.LinAlgError:
        return False


def random_sem(graph, weight_low=0.1, weight_high=1.0,
               omega_diag_range=(1.0, 2.0), rng_seed=0):
    """Random parameters for a DAG or MAG.

    Directed coefficients are uniform on +-[weight_low, weight_high).  Omega
    has uniform diagonal, bidirected entries scaled relative to the incident
    variances, and (for undirected components) a block generated through its
    inverse so that the inverse support matches the undirected edges.  The
    bidirected magnitudes are halved up to 100 times until Omega is positive
    definite.
    """
    rng = np.random.default_rng(rng_seed)
    p = graph.p
    b = np.zeros((p, p))
    omega = np.zeros((p, p))
    lo, hi = omega_diag_range
    np.fill_diagonal(omega, rng.uniform(lo, hi, size=p))

    bidirected = []
    undirected = []
    for e in graph.edges():
        if e.mark_at_a == HEAD and e.mark_at_b == HEAD:
            bidirected.append((e.a, e.b))
        elif e.mark_at_a == TAIL and e.mark_at_b == TAIL:
            undirected.append((e.a, e.b))
        elif e.mark_at_a == CIRCLE or e.mark_at_b == CIRCLE:
            raise CircleMarkPresent(
                "SEM parameterization requires a DAG or MAG, not a PAG"
            )
        else:
            child, par = (e.a, e.b) if e.mark_at_a == HEAD else (e.b, e.a)
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            b[child, par] = sign * rng.uniform(weight_low, weight_high)

    if undirected:
        un_nodes = sorted({v for uv in undirected for v in uv})
        un_idx = {v: k for k, v in enumerate(un_nodes)}
        m = len(un_nodes)
        # inverse-support construction: K PD with support on the undirected
        # edges, block of Omega = K^{-1}, rescaled to the diagonal range
        k_mat = np.zeros((m, m))
        for a, bb in undirected:
            w = rng.uniform(0.1, 0.4) * (1.0 if rng.uniform() < 0.5 else -1.0)
            k_mat[un_idx[a], un_idx[bb]] = w
            k_mat[un_idx[bb], un_idx[a]] = w
        np.fill_diagonal(k_mat, np.abs(k_mat).sum(axis=1) + 1.0)
        block = np.linalg.inv(k_mat)
        d = np.sqrt(np.diag(omega)[un_nodes] / np.diag(block))
        block = block * np.outer(d, d)
        for a in un_nodes:
            for bb in un_nodes:
                omega[a, bb] = block[un_idx[a], un_idx[bb]]

    raw = {}
    for a, bb in bidirected:
        sign = 1.0 if rng.uniform() < 0.5 else -1.0
        raw[(a, bb)] = sign * rng.uniform(0.1, 0.5)
    scale = 1.0
    for _ in range(100):
        trial = omega.copy()
        for (a, bb), w in raw.items():
            val = scale * w * np.sqrt(omega[a, a] * omega[bb, bb])
            trial[a, bb] = val
            trial[bb, a] = val
        if _is_pd(trial):
            return SemModel(graph=graph, B=b, Omega=trial)
        scale *= 0.5
    raise NotPositiveDefinite(
        "could not keep Omega positive definite after 100 rescaling attempts"
    )


def covariance(m):
    """Exact covariance (I-B)^{-1} Omega (I-B)^{-T}, via solves."""
    a = np.eye(m.p) - m.B
    try:
        y = np.linalg.solve(a, m.Omega)
        sig = np.linalg.solve(a, y.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("I - B is singular") from exc
    return 0.5 * (sig + sig.T)


def sample(m, n, rng_seed=0):
    """n i.i.d. draws of W = (I-B)^{-1} eps with eps ~ N(0, Omega)."""
    rng = np.random.default_rng(rng_seed)
    try:
        chol = np.linalg.cholesky(m.Omega)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("Omega is not positive definite") from exc
    eps = rng.standard_normal((n, m.p)) @ chol.T
    a = np.eye(m.p) - m.B
    try:
        w = np.linalg.solve(a, eps.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("I - B is singular") from exc
    return w


def standardize(sigma):
    """Correlation matrix Sigma_ij / sqrt(Sigma_ii Sigma_jj)."""
    d = np.diag(sigma)
    if np.any(d <= 0):
        raise ZeroVariance("standardization requires positive variances")
    s = 1.0 / np.sqrt(d)
    return sigma * np.outer(s, s)


def short_trek_cov(m, gamma):
    """Covariance restricted to treks with sides of length <= gamma:
    Lambda_H Omega Lambda_H^T with Lambda_H = sum_{r=0}^gamma B^r."""
    lam = np.eye(m.p)
    term = np.eye(m.p)
    for _ in range(int(gamma)):
        term = term @ m.B
        lam = lam + term
    return lam @ m.Omega @ lam.T


def spectral_norm(b):
    """Largest singular value."""
    b = np.asarray(b, dtype=float)
    if b.size == 0:
        return 0.0
    return float(np.linalg.norm(b, 2))


@dataclass(frozen=True)
class Trek:
    """Two directed paths into the endpoints, optionally bridged by a
    bidirected edge between the top nodes.

    left_path runs from top node s down to the initial endpoint; right_path
    from top node t down to the final endpoint.  middle is (s, t) for a
    bidirected bridge and None when s = t.
    """

    left_path: tuple
    middle: Optional[tuple]
    right_path: tuple

    @property
    def source(self):
        return self.left_path[-1]

    @property
    def target(self):
        return self.right_path[-1]

    @property
    def tops(self):
        if self.middle is None:
            return (self.left_path[0],)
        return self.middle


def _check_trek_graph(g):
    for e in g.edges():
        if e.mark_at_a == TAIL and e.mark_at_b == TAIL:
            raise UnsupportedEdge(
                "trek operations require graphs without undirected edges"
            )
        if e.mark_at_a == CIRCLE or e.mark_at_b == CIRCLE:
            raise CircleMarkPresent(
                "trek operations require graphs without circle marks"
            )


def _directed_paths_into(g, dst, max_len):
    """All simple directed paths (as node tuples top..dst) of length
    <= max_len, found by walking parent edges upward."""
    out = [(dst,)]
    frontier = [(dst,)]
    for _ in range(max_len):
        nxt = []
        for path in frontier:
            head = path[0]
            for u in g.parents(head):
                if u not in path:
                    grown = (u,) + path
                    out.append(grown)
                    nxt.append(grown)
        frontier = nxt
    return out


def enumerate_treks(m, i, j, max_total_len=None):
    """All treks from i to j whose two directed sides total at most
    max_total_len edges."""
    g = m.graph
    if g.p > _TREK_LIMIT:
        raise GraphTooLarge(f"trek enumeration limited to {_TREK_LIMIT} nodes")
    _check_trek_graph(g)
    cap = 2 * g.p if max_total_len is None else int(max_total_len)
    lefts = _directed_paths_into(g, i, cap)
    rights = _directed_paths_into(g, j, cap)
    bidir = set()
    for e in g.edges():
        if e.mark_at_a == HEAD and e.mark_at_b == HEAD:
            bidir.add((e.a, e.b))
            bidir.add((e.b, e.a))
    treks = []
    for lp in lefts:
        for rp in rights:
            if len(lp) + len(rp) - 2 > cap:
                continue
            s, t = lp[0], rp[0]
            if s == t:
                treks.append(Trek(left_path=lp, middle=None, right_path=rp))
            elif (s, t) in bidir:
                treks.append(Trek(left_path=lp, middle=(s, t), right_path=rp))
    return treks


def trek_monomial(m, t):
    """Product of the edge coefficients on both sides times the omega entry
    of the top node(s)."""
    val = 1.0
    for path in (t.left_path, t.right_path):
        for k in range(len(path) - 1):
            val *= m.B[path[k + 1], path[k]]
    if t.middle is None:
        val *= m.Omega[t.left_path[0], t.left_path[0]]
    else:
        val *= m.Omega[t.middle[0], t.middle[1]]
    return val


@dataclass(frozen=True)
class TrekSystem:
    """k treks whose initial nodes exhaust C and final nodes exhaust D,
    signed by the induced permutation of the sorted node lists."""

    treks: tuple
    c_nodes: tuple
    d_nodes: tuple

    @property
    def sign(self):
        pos = {d: k for k, d in enumerate(self.d_nodes)}
        perm = [pos[t.target] for t in self.treks]
        sign = 1
        for a in range(len(perm)):
            for b in range(a + 1, len(perm)):
                if perm[a] > perm[b]:
                    sign = -sign
        return sign

    def has_sided_intersection(self):
        # two treks intersect sidedly iff their left sides share a node or
        # their right sides share a node; left sides include the top s and
        # right sides the top t, so a bidirected middle adds no nodes of its
        # own (s and t live on opposite sides and may coincide across treks)
        for a, b in itertools.combinations(self.treks, 2):
            if set(a.left_path) & set(b.left_path):
                return True
            if set(a.right_path) & set(b.right_path):
                return True
        return False


def trek_systems(m, c_nodes, d_nodes):
    """All trek systems between sorted C and D (intersecting ones included)."""
    c_nodes = tuple(sorted(c_nodes))
    d_nodes = tuple(sorted(d_nodes))
    if len(c_nodes) != len(d_nodes):
        raise SizeMismatch("C and D must have equal size")
    if m.p > _TREK_LIMIT:
        raise GraphTooLarge(f"trek expansion limited to {_TREK_LIMIT} nodes")
    k = len(c_nodes)
    pair_treks = {
        (c, d): enumerate_treks(m, c, d) for c in c_nodes for d in d_nodes
    }
    systems = []
    for perm in itertools.permutations(range(k)):
        choices = [pair_treks[(c_nodes[r], d_nodes[perm[r]])] for r in range(k)]
        for picked in itertools.product(*choices):
            systems.append(
                TrekSystem(treks=picked, c_nodes=c_nodes, d_nodes=d_nodes)
            )
    return systems


def system_monomial(m, system):
    val = 1.0
    for t in system.treks:
        val *= trek_monomial(m, t)
    return val


def det_via_treks(m, c_nodes, d_nodes, include_intersecting=False):
    """Signed sum of trek-system monomials over systems without sided
    intersection; equals det covariance(m)[C, D].  Setting
    include_intersecting sums over every system instead, which must give
    the same value because intersecting weights cancel."""
    total = 0.0
    for system in trek_systems(m, c_nodes, d_nodes):
        if not include_intersecting and system.has_sided_intersection():
            continue
        total += system.sign * system_monomial(m, system)
    return total


def local_corr_residual(m, gamma, eta):
    """Largest, over non-adjacent pairs, of the smallest absolute partial
    correlation achievable with a local separator of size <= eta.

    Zero certifies that every non-adjacent pair has some local separator
    that is also an exact population separator.  Pairs with no local
    separator within the size cap make the probe infinite.
    """
    return local_corr_residual_cov(m.graph, covariance(m), gamma, eta)


def local_corr_residual_cov(g, sig, gamma, eta, zero_tol=1e-12):
    """local_corr_residual against an explicit covariance over the nodes of
    ``g``, for graphs whose distribution is given marginally (for example a
    projected MAG with the covariance of the full model's observed block).

    A pair stops enumerating once some separator's correlation falls below
    zero_tol; solves never hit exact zero, and past that point the pair
    cannot move the maximum.
    """
    from .citest import partial_correlation

    worst = 0.0
    for i in range(g.p):
        for j in range(i + 1, g.p):
            if g.adjacent(i, j):
                continue
            lg = local_graph(g, i, j, gamma)
            candidates = sorted(lg.node_subset - {i, j})
            best = None
            for size in range(0, min(int(eta), len(candidates)) + 1):
                for comb in itertools.combinations(candidates, size):
                    if not m_separated(lg.induced, i, j, set(comb)):
                        continue
                    rho = abs(partial_correlation(sig, i, j, set(comb)))
                    if best is None or rho < best:
                        best = rho
                    if best <= zero_tol:
                        break
                if best is not None and best <= zero_tol:
                    break
            if best is None:
                return float("inf")
            worst = max(worst, best)
    return worst


def save_sem(m, graph_path, b_path, omega_path):
    """Write the model as a graph file plus two CSVs of (i, j, value)
    triples for the nonzero entries of B and Omega."""
    with open(graph_path, "w") as fh:
        fh.write(serialize_graph(m.graph))
    for path, mat, sym in ((b_path, m.B, False), (omega_path, m.Omega, True)):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "value"])
            for i in range(m.p):
                start = i if sym else 0
                for j in range(start, m.p):
                    if mat[i, j] != 0.0:
                        writer.writerow([i, j, repr(float(mat[i, j]))])


def load_sem(graph_path, b_path, omega_path):
    """Inverse of save_sem."""
    with open(graph_path) as fh:
        g = parse_graph(fh.read())
    b = np.zeros((g.p, g.p))
    omega = np.zeros((g.p, g.p))
    for path, mat, sym in ((b_path, b, False), (omega_path, omega, True)):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["i", "j", "value"]:
                raise ValueError(f"unexpected header in {path}: {header}")
            for row in reader:
                i, j, val = int(row[0]), int(row[1]), float(row[2])
                mat[i, j] = val
                if sym:
                    mat[j, i] = val
    return SemModel(graph=g, B=b, Omega=omega)
