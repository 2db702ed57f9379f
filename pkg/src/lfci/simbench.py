"""Random graph families, benchmark instance generation, structure metrics,
and the experiment harnesses: oracle recovery tables, finite-sample
precision-recall sweeps, and probes for the short-trek approximation and
local moral graphs.

Replicates derive their randomness from SeedSequence(seed, spawn_key=(r,)),
so results are independent of evaluation order and safe to parallelize.
Structural draws (edges, latent choice, topological order) go through
integer generator calls only, which keeps graphs reproducible across
platforms.
"""

import csv
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .citest import GraphOracle, SampleTest, sample_covariance
from .discovery import (
    Gamma,
    Neighborhood,
    estimate_moral_graph,
    fci,
    fci_skeleton,
    lfci,
    lfci_mb,
    skeleton_search,
)
from .errors import ConfigError, NoConvergence, SizeMismatch
from .mixed_graph import HEAD, TAIL, from_edges, skeleton
from .projection import Partition, latent_project, project_unchecked, true_pag
from .sem import (
    SemModel,
    covariance,
    local_corr_residual_cov,
    random_sem,
    sample,
    short_trek_cov,
)
from .separation import UNBOUNDED, m_separated, moral_graph

ORACLE_COLUMNS = (
    "family",
    "p",
    "method",
    "recovered_frac",
    "rho_star_median",
    "log_n_tests_mean",
    "m_reach_mean",
)
PR_COLUMNS = ("method", "alpha", "precision_mean", "recall_mean", "replicates")


# -- graph families -------------------------------------------------------


@dataclass(frozen=True)
class ErdosRenyi:
    """G(p, m) with m = round(p * avg_degree / 2) uniformly chosen edges."""

    p: int
    avg_degree: float = 2.0

    def __post_init__(self):
        _check_family(self.p, self.avg_degree)


@dataclass(frozen=True)
class PowerLaw:
    """Preferential attachment with one edge per arriving node, topped up
    with uniform extra edges until the target average degree is met."""

    p: int
    avg_degree: float = 2.0

    def __post_init__(self):
        _check_family(self.p, self.avg_degree)


@dataclass(frozen=True)
class WattsStrogatz:
    """Ring lattice joining each node to its round(avg_degree / 2) nearest
    neighbors per side, with each lattice edge rewired independently."""

    p: int
    avg_degree: float = 2.0
    rewire_prob: float = 0.1

    def __post_init__(self):
        _check_family(self.p, self.avg_degree)
        if not 0.0 <= self.rewire_prob <= 1.0:
            raise ConfigError("rewire_prob must lie in [0, 1]")


@dataclass(frozen=True)
class Hybrid:
    """Union of a local-path part drawn from ``family`` and a sparse random
    overlay whose per-node degree (within the overlay alone) never exceeds
    delta."""

    delta: int
    family: object

    def __post_init__(self):
        if self.delta < 1:
            raise ConfigError("delta must be at least 1")

    @property
    def p(self):
        return self.family.p


def _check_family(p, avg_degree):
    if p < 2:
        raise ConfigError("graph families need p >= 2")
    if avg_degree <= 0:
        raise ConfigError("avg_degree must be positive")


def _target_edges(p, avg_degree):
    return min(int(round(p * avg_degree / 2.0)), p * (p - 1) // 2)


def _bernoulli(rng, prob):
    # integer draw so the structural RNG path stays platform-stable
    den = 1 << 30
    return int(rng.integers(den)) < int(round(prob * den))


def _er_edges(fam, rng):
    m = _target_edges(fam.p, fam.avg_degree)
    ii, jj = np.triu_indices(fam.p, 1)
    pick = rng.choice(ii.size, size=m, replace=False)
    return {(int(ii[k]), int(jj[k])) for k in pick}


def _pl_edges(fam, rng):
    p = fam.p
    edges = set()
    targets = [0]
    for t in range(1, p):
        u = int(targets[int(rng.integers(len(targets)))])
        edges.add((min(t, u), max(t, u)))
        targets.extend((t, u))
    extra = _target_edges(p, fam.avg_degree) - len(edges)
    guard = 0
    while extra > 0 and guard < 1000 * p:
        guard += 1
        a = int(rng.integers(p))
        b = int(rng.integers(p))
        if a == b:
            continue
        e = (min(a, b), max(a, b))
        if e in edges:
            continue
        edges.add(e)
        extra -= 1
    return edges


def _ws_edges(fam, rng):
    p = fam.p
    half = max(1, int(round(fam.avg_degree / 2.0)))
    edges = set()
    for i in range(p):
        for d in range(1, half + 1):
            j = (i + d) % p
            if i != j:
                edges.add((min(i, j), max(i, j)))
    for e in sorted(edges):
        if not _bernoulli(rng, fam.rewire_prob):
            continue
        i, _ = e
        for _attempt in range(4 * p):
            w = int(rng.integers(p))
            cand = (min(i, w), max(i, w))
            if w == i or cand in edges:
                continue
            edges.discard(e)
            edges.add(cand)
            break
    return edges


def _hybrid_edges(fam, rng):
    edges = _undirected_edges(fam.family, rng)
    p = fam.p
    deg = [0] * p
    extra = p // 2
    guard = 0
    while extra > 0 and guard < 1000 * p:
        guard += 1
        a = int(rng.integers(p))
        b = int(rng.integers(p))
        if a == b:
            continue
        e = (min(a, b), max(a, b))
        if e in edges:
            continue
        if deg[a] >= fam.delta or deg[b] >= fam.delta:
            continue
        edges.add(e)
        deg[a] += 1
        deg[b] += 1
        extra -= 1
    return edges


def _undirected_edges(family, rng):
    if isinstance(family, ErdosRenyi):
        return _er_edges(family, rng)
    if isinstance(family, PowerLaw):
        return _pl_edges(family, rng)
    if isinstance(family, WattsStrogatz):
        return _ws_edges(family, rng)
    if isinstance(family, Hybrid):
        return _hybrid_edges(family, rng)
    raise ConfigError(f"unknown graph family {family!r}")


def generate_graph(family, rng_seed):
    """Random DAG: the family's undirected skeleton oriented by a uniformly
    random topological order."""
    p = family.p
    if p < 2:
        raise ConfigError("graph families need p >= 2")
    rng = np.random.default_rng(rng_seed)
    und = _undirected_edges(family, rng)
    order = rng.permutation(p)
    rank = np.empty(p, dtype=np.int64)
    rank[order] = np.arange(p)
    edges = []
    for a, b in sorted(und):
        if rank[a] < rank[b]:
            edges.append((a, b, TAIL, HEAD))
        else:
            edges.append((b, a, TAIL, HEAD))
    return from_edges(p, edges)


# -- experiment configuration and instances -------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    family: object
    p: int
    n: int = 0
    latent_fraction: float = 0.2
    alpha_grid: tuple = ()
    eta: int = 3
    gamma: int = 6
    replicates: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.family.p != self.p:
            raise ConfigError(
                f"config p={self.p} disagrees with family p={self.family.p}"
            )
        if not 0.0 <= self.latent_fraction < 1.0:
            raise ConfigError("latent_fraction must lie in [0, 1)")
        grid = tuple(float(a) for a in self.alpha_grid)
        if any(y <= x for x, y in zip(grid, grid[1:])):
            raise ConfigError("alpha_grid must be sorted ascending")
        object.__setattr__(self, "alpha_grid", grid)
        if self.n < 0:
            raise ConfigError("n must be non-negative")
        if self.eta < 0:
            raise ConfigError("eta must be non-negative")
        if self.gamma < 1:
            raise ConfigError("gamma must be at least 1")
        if self.replicates < 1:
            raise ConfigError("need at least one replicate")


@dataclass
class Metrics:
    precision: float = None
    recall: float = None
    shd: int = None
    edge_mark_diff: int = None
    dshd: float = None
    n_tests: int = None
    m_reach: int = None


class Instance(NamedTuple):
    dag: object
    partition: object
    model: object
    mag: object
    pag: object
    data: object


def _replicate_children(seed, r, k):
    return np.random.SeedSequence(entropy=seed, spawn_key=(r,)).spawn(k)


def _graphs_from(cfg, kids):
    dag = generate_graph(cfg.family, kids[0])
    q = min(int(round(cfg.latent_fraction * cfg.p)), cfg.p - 1)
    latent = set()
    if q > 0:
        lat_rng = np.random.default_rng(kids[1])
        latent = {int(v) for v in lat_rng.choice(cfg.p, size=q, replace=False)}
    part = Partition(
        observed=frozenset(range(cfg.p)) - latent,
        latent=frozenset(latent),
        selection=frozenset(),
    )
    if cfg.p <= 20:
        mag = latent_project(dag, part)
    else:
        mag = project_unchecked(dag, part)
    return dag, part, mag


def make_instance(cfg, replicate_index):
    """Deterministic benchmark instance: DAG, latent split, SEM parameters,
    projected MAG, its maximally informative PAG, and an n-by-(observed)
    Gaussian dataset (empty when cfg.n = 0)."""
    kids = _replicate_children(cfg.seed, replicate_index, 4)
    dag, part, mag = _graphs_from(cfg, kids)
    model = random_sem(dag, rng_seed=kids[2])
    pag = true_pag(mag)
    obs = sorted(part.observed)
    if cfg.n > 0:
        data = sample(model, cfg.n, rng_seed=kids[3])[:, obs]
    else:
        data = np.zeros((0, len(obs)))
    return Instance(
        dag=dag, partition=part, model=model, mag=mag, pag=pag, data=data
    )


# -- structure metrics ----------------------------------------------------


def _adjacency(g):
    return {(e.a, e.b) for e in g.edges()}


def _check_sizes(est, truth):
    if est.p != truth.p:
        raise SizeMismatch(
            f"graphs have different node counts: {est.p} vs {truth.p}"
        )


def skeleton_metrics(est, truth):
    """Precision and recall of unordered adjacencies; empty predictions and
    empty truths score a vacuous 1."""
    _check_sizes(est, truth)
    pe, te = _adjacency(est), _adjacency(truth)
    tp = len(pe & te)
    fp = len(pe - te)
    fn = len(te - pe)
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return Metrics(precision=precision, recall=recall)


def _mark_mismatches(est, truth, a, b):
    return int(est.mark_at(a, b) != truth.mark_at(a, b)) + int(
        est.mark_at(b, a) != truth.mark_at(b, a)
    )


def shd_and_marks(est, truth):
    """Structural Hamming distance (adjacency mismatches plus shared edges
    with any differing endpoint mark) and the total endpoint-mark
    difference count over shared edges."""
    _check_sizes(est, truth)
    pe, te = _adjacency(est), _adjacency(truth)
    shd = len(pe ^ te)
    mark_diff = 0
    for a, b in pe & te:
        d = _mark_mismatches(est, truth, a, b)
        mark_diff += d
        if d:
            shd += 1
    return shd, mark_diff


def dshd(est, truth):
    """Distance charging 1 per added or deleted edge and half per differing
    endpoint mark on shared edges."""
    _check_sizes(est, truth)
    pe, te = _adjacency(est), _adjacency(truth)
    total = float(len(pe ^ te))
    for a, b in pe & te:
        total += 0.5 * _mark_mismatches(est, truth, a, b)
    return total


# -- oracle and finite-sample harnesses -----------------------------------


def _family_name(family):
    return type(family).__name__


def recovery_premise(mag, gamma, eta, moral=None):
    """Instance-level check for exact skeleton recovery by the bounded local
    search with a global-separation oracle.

    True iff every non-adjacent pair (restricted to moral-graph-adjacent
    pairs with size cap eta - 1 when ``moral`` is given, matching the
    warm-started search) has a subset of its distance-gamma candidate pool
    that m-separates the pair in the full graph.  Search pools computed on
    working skeletons only grow relative to these, so a witness here is
    reachable by the search.  A False return identifies a draw outside the
    regime where exact recovery is guaranteed.
    """
    skel = skeleton(mag)
    dists = [_skeleton_hops(skel, v) for v in range(mag.p)]
    cap = eta if moral is None else max(eta - 1, 0)
    for i in range(mag.p):
        for j in range(i + 1, mag.p):
            if mag.adjacent(i, j):
                continue
            if moral is not None and not moral.adjacent(i, j):
                continue
            pool = sorted(
                k
                for k in range(mag.p)
                if k != i and k != j and dists[i][k] + dists[j][k] <= gamma
            )
            found = False
            for size in range(0, min(cap, len(pool)) + 1):
                for comb in itertools.combinations(pool, size):
                    if m_separated(mag, i, j, set(comb)):
                        found = True
                        break
                if found:
                    break
            if not found:
                return False
    return True


def _skeleton_hops(skel, src):
    far = skel.p + 1
    dist = [far] * skel.p
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for w in skel.neighbors(v):
                if dist[w] == far:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def _oracle_replicate(cfg, r, probe_rho, methods):
    """One oracle-recovery replicate; returns per-method raw results plus
    the optional residual, so replicates can run in separate processes."""
    inst = make_instance(cfg, r)
    mag = inst.mag
    rho = None
    if probe_rho:
        obs = sorted(inst.partition.observed)
        sig = covariance(inst.model)[np.ix_(obs, obs)]
        rho = local_corr_residual_cov(mag, sig, cfg.gamma, cfg.eta)
    moral = moral_graph(mag)
    runs = {
        "fci": lambda t: fci(t, mag.p, allow_large=True),
        "lfci": lambda t: lfci(t, mag.p, cfg.eta, cfg.gamma),
        "lfci_mb": lambda t: lfci_mb(t, mag.p, cfg.eta, cfg.gamma, moral),
    }
    per_method = {}
    for meth in methods:
        tester = GraphOracle(mag)
        out, _, stats = runs[meth](tester)
        per_method[meth] = (
            int(out == inst.pag),
            math.log(max(stats.n_tests, 1)),
            stats.m_reach,
        )
    return rho, per_method


def _aggregate_oracle(cfg, methods, results):
    rhos = [rho for rho, _ in results if rho is not None]
    rho_median = float(np.median(rhos)) if rhos else float("nan")
    rows = []
    for meth in methods:
        rec = [per[meth][0] for _, per in results]
        logs = [per[meth][1] for _, per in results]
        reach = [per[meth][2] for _, per in results]
        rows.append(
            {
                "family": _family_name(cfg.family),
                "p": cfg.p,
                "method": meth,
                "recovered_frac": sum(rec) / cfg.replicates,
                "rho_star_median": rho_median,
                "log_n_tests_mean": float(np.mean(logs)),
                "m_reach_mean": float(np.mean(reach)),
            }
        )
    return rows


def oracle_experiment(cfg, probe_rho=True, methods=("fci", "lfci", "lfci_mb")):
    """Population-oracle recovery table.

    Runs the chosen methods with an exact separation oracle on each
    replicate's MAG and reports, per method, the fraction of replicates
    whose output equals the true PAG, the median local-correlation residual
    of the instances, mean log test count, and mean maximum reached level.
    Returns one row dict per method; ``probe_rho=False`` skips the residual
    (reported as nan) for large runs.  The fci baseline retests within
    possible-D-SEP pools without a level cap, which is exponential around
    high-degree hubs; drop it from ``methods`` on such inputs.
    """
    if cfg.p > 50:
        raise ConfigError("oracle_experiment is limited to p <= 50")
    for meth in methods:
        if meth not in ("fci", "lfci", "lfci_mb"):
            raise ConfigError(f"unknown method {meth!r}")
    results = [
        _oracle_replicate(cfg, r, probe_rho, methods)
        for r in range(cfg.replicates)
    ]
    return _aggregate_oracle(cfg, methods, results)


def _method_skeleton(meth, tester, p, cfg, moral_est):
    # mirrors the skeleton phase of each pipeline; orientation is skipped
    # because noisy separator records need not be mutually consistent
    if meth == "pc":
        skel, _, _ = skeleton_search(tester, p, Neighborhood(), eta=UNBOUNDED)
    elif meth == "fci":
        skel, _, _ = fci_skeleton(tester, p, allow_large=True)
    elif meth == "lfci":
        skel, _, _ = skeleton_search(tester, p, Gamma(cfg.gamma), eta=cfg.eta)
    elif meth == "lfci_mb":
        skel, _, _ = skeleton_search(
            tester,
            p,
            Gamma(cfg.gamma),
            eta=max(cfg.eta - 1, 0),
            initial=moral_est,
        )
    else:
        raise ConfigError(f"unknown method {meth!r}")
    return skel


_PR_METHODS = ("pc", "fci", "lfci", "lfci_mb")


def _pr_replicate(cfg, r, ridge, tau):
    """One finite-sample replicate: skeleton precision/recall for every
    (method, alpha) cell on a shared covariance estimate."""
    inst = make_instance(cfg, r)
    p_obs = inst.mag.p
    est = sample_covariance(inst.data)
    tau_val = tau
    if tau_val is None:
        tau_val = 2.0 * math.sqrt(math.log(max(p_obs, 2)) / est.n)
    moral_est = estimate_moral_graph(est, ridge, tau_val)
    cells = {}
    for alpha in cfg.alpha_grid:
        for meth in _PR_METHODS:
            tester = SampleTest(est.sigma_hat, est.n, alpha)
            skel = _method_skeleton(meth, tester, p_obs, cfg, moral_est)
            m = skeleton_metrics(skel, inst.mag)
            cells[(meth, alpha)] = (m.precision, m.recall)
    return cells


def _aggregate_pr(cfg, results):
    rows = []
    for meth in _PR_METHODS:
        for alpha in cfg.alpha_grid:
            vals = np.asarray(
                [cells[(meth, alpha)] for cells in results], dtype=np.float64
            )
            rows.append(
                {
                    "method": meth,
                    "alpha": alpha,
                    "precision_mean": float(vals[:, 0].mean()),
                    "recall_mean": float(vals[:, 1].mean()),
                    "replicates": cfg.replicates,
                }
            )
    return rows


def pr_sweep(cfg, ridge=1e-3, tau=None):
    """Skeleton precision/recall against the true MAG skeleton for each
    method and significance level, averaged over replicates.

    ``tau`` is the relative threshold of the moral-graph estimate used by
    lfci_mb; the default scales as 2 sqrt(log p / n).
    """
    results = [
        _pr_replicate(cfg, r, ridge, tau) for r in range(cfg.replicates)
    ]
    return _aggregate_pr(cfg, results)


# -- assumption probes ----------------------------------------------------


@dataclass(frozen=True)
class TrekConfig:
    """Model family for the short-trek probe: weights are drawn uniform on
    (-10, 10) or normal with standard deviation 3, error variances uniform
    on (1, 2), and the model is standardized before measuring d_gamma."""

    family: object
    weights: str = "uniform"
    replicates: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.weights not in ("uniform", "normal"):
            raise ConfigError("weights must be 'uniform' or 'normal'")
        if self.replicates < 1:
            raise ConfigError("need at least one replicate")


def trek_model(graph, weights, rng_seed):
    """SEM on a DAG with the probe's weight and variance distributions."""
    rng = np.random.default_rng(rng_seed)
    p = graph.p
    b = np.zeros((p, p))
    for e in graph.edges():
        child, par = (e.b, e.a) if e.mark_at_b == HEAD else (e.a, e.b)
        if weights == "uniform":
            b[child, par] = rng.uniform(-10.0, 10.0)
        else:
            b[child, par] = rng.normal(0.0, 3.0)
    omega = np.diag(rng.uniform(1.0, 2.0, size=p))
    return SemModel(graph=graph, B=b, Omega=omega)


def standardized_model(m):
    """Rescale to unit variances: B~ = D B D^-1, Omega~ = D Omega D with
    D = diag(Sigma)^{-1/2}, so the model covariance is the correlation
    matrix of the original."""
    sig = covariance(m)
    s = 1.0 / np.sqrt(np.diag(sig))
    bt = m.B * np.outer(s, 1.0 / s)
    ot = m.Omega * np.outer(s, s)
    return SemModel(graph=m.graph, B=bt, Omega=ot)


def d_gamma(m_std, gamma):
    """Largest entrywise gap between the model covariance and its short-trek
    truncation at the given gamma."""
    return float(np.max(np.abs(covariance(m_std) - short_trek_cov(m_std, gamma))))


def min_gamma_short_trek(cfg, tol=1e-4):
    """Per replicate, the smallest gamma at which the standardized model's
    short-trek covariance is entrywise within tol of the exact one."""
    out = []
    for r in range(cfg.replicates):
        kids = _replicate_children(cfg.seed, r, 2)
        graph = generate_graph(cfg.family, kids[0])
        m = standardized_model(trek_model(graph, cfg.weights, kids[1]))
        target = covariance(m)
        found = None
        for gamma in range(graph.p):
            gap = float(np.max(np.abs(target - short_trek_cov(m, gamma))))
            if gap <= tol:
                found = gamma
                break
        if found is None:
            # unreachable for DAGs: B is nilpotent, so gamma = p - 1 is exact
            raise NoConvergence(
                f"d_gamma stayed above {tol} through gamma = {graph.p - 1}"
            )
        out.append(found)
    return out


def local_moral_equality(cfg):
    """Fraction of replicates whose gamma-truncated moral graph equals the
    untruncated one."""
    same = 0
    for r in range(cfg.replicates):
        kids = _replicate_children(cfg.seed, r, 4)
        _, _, mag = _graphs_from(cfg, kids)
        if moral_graph(mag, cfg.gamma) == moral_graph(mag):
            same += 1
    return same / cfg.replicates


# -- CSV output -----------------------------------------------------------


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_csv(path, rows, columns):
    """Write row dicts under the given header; floats use 6 significant
    digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
