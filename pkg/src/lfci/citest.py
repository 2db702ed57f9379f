"""Conditional-independence deciders behind one counting interface: exact
graph oracle, Gaussian population oracle, and finite-sample Fisher-z test."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from ._kernels import first_leq, pcorr
from .errors import (
    DegenerateResidualVariance,
    EmptyData,
    InsufficientSamples,
    InvalidConditioningSet,
    ParseError,
    SingularConditioningBlock,
    SizeMismatch,
)
from .separation import m_separated

_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class CovEstimate:
    """Sample covariance matrix together with the sample count behind it."""

    sigma_hat: np.ndarray = field(repr=False)
    n: int = 0


def _validate_pair(p, i, j, s):
    if not (0 <= i < p and 0 <= j < p):
        raise InvalidConditioningSet(f"nodes ({i}, {j}) out of range for p={p}")
    if i == j:
        raise InvalidConditioningSet("i and j must differ")
    for v in s:
        if not 0 <= v < p:
            raise InvalidConditioningSet(f"conditioning node {v} out of range")
        if v == i or v == j:
            raise InvalidConditioningSet("conditioning set must exclude i and j")


def partial_correlation(sigma, i, j, s):
    """rho(i, j | S) from a covariance matrix, via the Schur complement of
    the conditioning block."""
    sigma = np.asarray(sigma, dtype=np.float64)
    _validate_pair(sigma.shape[0], i, j, s)
    rho, status = pcorr(sigma, i, j, sorted(s))
    if status == 1:
        raise SingularConditioningBlock(
            f"conditioning block for S={sorted(s)} is numerically singular"
        )
    if status == 2:
        raise DegenerateResidualVariance(
            f"non-positive residual variance for ({i}, {j} | {sorted(s)})"
        )
    return float(rho)


def sample_covariance(data):
    """Mean-centered covariance with the 1/n convention."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise EmptyData("data must be a 2-d array of samples by nodes")
    n = data.shape[0]
    if n < 1:
        raise EmptyData("need at least one sample")
    centered = data - data.mean(axis=0)
    sig = centered.T @ centered / n
    return CovEstimate(sigma_hat=0.5 * (sig + sig.T), n=n)


def _fisher_g(rho):
    rho = min(max(rho, -_CLAMP), _CLAMP)
    return math.atanh(rho)


def _upper_quantile(alpha):
    # -ndtri(alpha/2) instead of ndtri(1 - alpha/2): identical by symmetry
    # but keeps full precision when alpha is tiny
    return -float(ndtri(alpha / 2.0))


def fisher_z_decide(est, i, j, s, alpha):
    """True ("independent") iff sqrt(n-|S|-3) |g(rho_hat)| is at or below
    the two-sided normal quantile for alpha."""
    dof = est.n - len(s) - 3
    if dof < 1:
        raise InsufficientSamples(
            f"need n - |S| - 3 >= 1, got n={est.n}, |S|={len(s)}"
        )
    rho = partial_correlation(est.sigma_hat, i, j, s)
    stat = math.sqrt(dof) * abs(_fisher_g(rho))
    return stat <= _upper_quantile(alpha)


def threshold_alpha(n, lam, s=0):
    """Significance level at which the Fisher-z decision with |S| = s equals
    the plain threshold rule |rho_hat| <= lam/2."""
    dof = n - s - 3
    if dof < 1:
        raise InsufficientSamples(f"need n - s - 3 >= 1, got n={n}, s={s}")
    # survival form ndtr(-x) keeps precision where 1 - ndtr(x) would cancel
    return 2.0 * float(ndtr(-math.sqrt(dof) * math.atanh(lam / 2.0)))


class GraphOracle:
    """Decides queries by m-separation in a fixed graph."""

    def __init__(self, graph):
        self.graph = graph
        self.n_tests = 0

    def decide(self, i, j, s):
        self.n_tests += 1
        return bool(m_separated(self.graph, i, j, set(s)))

    def first_independent(self, i, j, subsets):
        for r, s in enumerate(subsets):
            if self.decide(i, j, set(s)):
                return r
        return -1


class GaussOracle:
    """Decides queries by |rho(i, j | S)| <= threshold on a population
    covariance matrix."""

    def __init__(self, sigma, threshold=1e-9):
        self.sigma = np.asarray(sigma, dtype=np.float64)
        self.threshold = float(threshold)
        self.n_tests = 0

    def decide(self, i, j, s):
        self.n_tests += 1
        return abs(partial_correlation(self.sigma, i, j, s)) <= self.threshold

    def first_independent(self, i, j, subsets):
        return _batch_first(self, self.sigma, i, j, subsets, self.threshold)


class SampleTest:
    """Fisher-z decisions on a sample covariance at significance alpha."""

    def __init__(self, sigma_hat, n, alpha):
        self.est = CovEstimate(
            sigma_hat=np.asarray(sigma_hat, dtype=np.float64), n=int(n)
        )
        self.alpha = float(alpha)
        self.n_tests = 0

    def decide(self, i, j, s):
        self.n_tests += 1
        return fisher_z_decide(self.est, i, j, s, self.alpha)

    def first_independent(self, i, j, subsets):
        k = len(subsets[0]) if subsets else 0
        dof = self.est.n - k - 3
        if dof < 1:
            raise InsufficientSamples(
                f"need n - |S| - 3 >= 1, got n={self.est.n}, |S|={k}"
            )
        # |g(rho)| <= q/sqrt(dof) is equivalent to |rho| <= tanh(q/sqrt(dof));
        # past the clamp point every query is declared independent
        thr = math.tanh(_upper_quantile(self.alpha) / math.sqrt(dof))
        if thr >= _CLAMP:
            thr = math.inf
        return _batch_first(self, self.est.sigma_hat, i, j, subsets, thr)


def _batch_first(tester, sigma, i, j, subsets, threshold):
    if not subsets:
        return -1
    k = len(subsets[0])
    for s in subsets:
        if len(s) != k:
            raise SizeMismatch("batched subsets must share one size")
        _validate_pair(sigma.shape[0], i, j, s)
    arr = np.asarray(
        [sorted(s) for s in subsets], dtype=np.int32
    ).reshape(len(subsets), k)
    row, n_eval, status, err_row = first_leq(sigma, i, j, arr, threshold)
    tester.n_tests += n_eval
    if status == 1:
        raise SingularConditioningBlock(
            f"conditioning block for S={sorted(subsets[err_row])} is "
            "numerically singular"
        )
    if status == 2:
        raise DegenerateResidualVariance(
            f"non-positive residual variance for "
            f"({i}, {j} | {sorted(subsets[err_row])})"
        )
    return row


def decide(tester, i, j, s):
    """Single entry point used by the search loops."""
    return tester.decide(i, j, s)


def load_data(path):
    """Read a samples-by-nodes CSV with a header row of node labels."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            labels = next(reader)
        except StopIteration:
            raise EmptyData(f"{path} is empty") from None
        labels = [x.strip() for x in labels]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(labels):
                raise ParseError(
                    f"expected {len(labels)} columns, got {len(row)}",
                    line_no=line_no,
                )
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ParseError(str(exc), line_no=line_no) from None
    if not rows:
        raise EmptyData(f"{path} has a header but no samples")
    return labels, np.asarray(rows, dtype=np.float64)
