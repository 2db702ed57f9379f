"""Benchmark the compiled kernels against the pure-Python fallback.

Times the four kernel entry points on seeded workloads, checks that both
backends agree, and finishes with an end-to-end pipeline comparison run in
subprocesses (backend selection happens at import time).

Run from the repository root:

    python3 benchmarks/kernel_bench.py
"""

import itertools
import os
import subprocess
import sys
import time

import numpy as np

from lfci import _pykern
from lfci.citest import GraphOracle
from lfci.sem import covariance
from lfci.simbench import ErdosRenyi, ExperimentConfig, make_instance

try:
    from lfci import _fastkern
except ImportError:
    _fastkern = None

SEED = 424242


def build_workloads():
    cfg = ExperimentConfig(
        family=ErdosRenyi(50), p=50, eta=3, gamma=6, replicates=1, seed=SEED
    )
    inst = make_instance(cfg, 0)
    mag = inst.mag
    arr = mag.arrays()
    rng = np.random.default_rng(SEED)

    queries = []
    for _ in range(1500):
        i, j = rng.choice(mag.p, size=2, replace=False)
        size = int(rng.integers(0, 5))
        pool = [v for v in range(mag.p) if v not in (i, j)]
        s = rng.choice(pool, size=size, replace=False)
        mask = np.zeros(mag.p, dtype=np.uint8)
        mask[s] = 1
        queries.append((int(i), int(j), mask))

    obs = sorted(inst.partition.observed)
    sig = covariance(inst.model)[np.ix_(obs, obs)]
    d = np.sqrt(np.diag(sig))
    corr = sig / np.outer(d, d)
    batches = []
    for _ in range(300):
        i, j = rng.choice(mag.p, size=2, replace=False)
        pool = [v for v in range(mag.p) if v not in (i, j)][:12]
        subsets = np.asarray(
            list(itertools.combinations(pool, 3)), dtype=np.int32
        )
        batches.append((int(i), int(j), subsets))

    return mag, arr, queries, corr, batches


def run_msep(kern, arr, queries):
    return [
        kern.msep(
            arr["indptr"], arr["nbr"], arr["mark_self"], arr["mark_other"],
            arr["pptr"], arr["pidx"], i, j, mask,
        )
        for i, j, mask in queries
    ]


def run_reach(kern, arr, p):
    out = []
    for _ in range(40):
        for i in range(p):
            out.append(
                bytes(
                    kern.collider_reach(
                        arr["indptr"], arr["nbr"], arr["mark_self"],
                        arr["mark_other"], i, 6, None,
                    )
                )
            )
    return out


def run_first_leq(kern, corr, batches):
    return [
        kern.first_leq(corr, i, j, subsets, 0.02)
        for i, j, subsets in batches
    ]


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def bench_kernels():
    mag, arr, queries, corr, batches = build_workloads()
    jobs = [
        ("msep x1500", run_msep, (arr, queries)),
        ("collider_reach x%d" % (40 * mag.p), run_reach, (arr, mag.p)),
        ("first_leq x300", run_first_leq, (corr, batches)),
    ]
    print(f"{'kernel workload':<28}{'compiled':>12}{'pure':>12}{'speedup':>10}")
    for name, fn, args in jobs:
        pure_out, pure_t = timed(fn, _pykern, *args)
        if _fastkern is None:
            print(f"{name:<28}{'n/a':>12}{pure_t:>11.3f}s{'':>10}")
            continue
        fast_out, fast_t = timed(fn, _fastkern, *args)
        tag = "" if _agrees(fast_out, pure_out) else "  MISMATCH"
        print(
            f"{name:<28}{fast_t:>11.3f}s{pure_t:>11.3f}s"
            f"{pure_t / max(fast_t, 1e-9):>9.1f}x{tag}"
        )


def _agrees(a, b):
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if isinstance(x, tuple):
            # first_leq rows: compare accept row and status only; the
            # evaluated-count convention matches by construction
            if x[0] != y[0] or x[2] != y[2]:
                return False
        elif x != y:
            return False
    return True


def bench_pipeline():
    script = (
        "import time\n"
        "from lfci.citest import GraphOracle\n"
        "from lfci.discovery import lfci\n"
        "from lfci.simbench import ErdosRenyi, ExperimentConfig, make_instance\n"
        "from lfci._kernels import backend_name\n"
        "cfg = ExperimentConfig(family=ErdosRenyi(50), p=50, eta=3, gamma=6,"
        " replicates=1, seed=%d)\n"
        "insts = [make_instance(cfg, r) for r in range(8)]\n"
        "t0 = time.perf_counter()\n"
        "for inst in insts:\n"
        "    lfci(GraphOracle(inst.mag), inst.mag.p, 3, 6)\n"
        "print(backend_name(), time.perf_counter() - t0)\n" % SEED
    )
    print()
    print("end-to-end: lfci with an exact oracle on 8 instances (p=50)")
    for env_val in ("0", "1"):
        env = dict(os.environ, LFCI_PURE_PYTHON=env_val)
        res = subprocess.run(
            [sys.executable, "-c", script], env=env,
            capture_output=True, text=True, check=True,
        )
        backend, secs = res.stdout.split()
        print(f"  {backend:<14}{float(secs):8.3f}s")


if __name__ == "__main__":
    bench_kernels()
    bench_pipeline()
