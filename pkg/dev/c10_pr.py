"""Criterion-10 pre-run: best-F1 for lfci vs fci on finite samples.

Per-family alpha grids: the fci baseline's possible-D-SEP retesting is
exponential once estimated skeletons get dense, so each family's grid stays
inside the band where all four methods complete.
"""

import sys
import time

from lfci.simbench import ErdosRenyi, ExperimentConfig, PowerLaw, pr_sweep

REPS = int(sys.argv[1]) if len(sys.argv) > 1 else 50
ER_GRID = (1e-8, 1e-6, 1e-4, 1e-3, 1e-2)
PL_GRID = (1e-10, 1e-8, 1e-6, 1e-5, 1e-4)


def best_f1(rows):
    table = {}
    for meth, alpha, prec, rec, _ in rows:
        f1 = 0.0 if prec + rec == 0 else 2 * prec * rec / (prec + rec)
        if meth not in table or f1 > table[meth][0]:
            table[meth] = (f1, alpha)
    return table


for fam, grid in ((ErdosRenyi(50), ER_GRID), (PowerLaw(50), PL_GRID)):
    cfg = ExperimentConfig(
        family=fam, p=50, n=500, alpha_grid=grid, eta=3, gamma=6,
        replicates=REPS, seed=50,
    )
    t0 = time.time()
    rows = pr_sweep(cfg)
    table = best_f1(rows)
    name = type(fam).__name__
    for meth in ("pc", "fci", "lfci", "lfci_mb"):
        f1, alpha = table[meth]
        print(f"{name} {meth}: bestF1={f1:.4f} at alpha={alpha}", flush=True)
    print(f"{name} [{time.time()-t0:.1f}s]", flush=True)
