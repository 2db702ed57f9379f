import time

import numpy as np

from lfci.mixed_graph import is_dag, skeleton
from lfci.simbench import (
    ErdosRenyi,
    ExperimentConfig,
    Hybrid,
    PowerLaw,
    TrekConfig,
    WattsStrogatz,
    dshd,
    generate_graph,
    local_moral_equality,
    make_instance,
    min_gamma_short_trek,
    oracle_experiment,
    pr_sweep,
    shd_and_marks,
    skeleton_metrics,
    write_csv,
    ORACLE_COLUMNS,
    PR_COLUMNS,
)

for fam in (
    ErdosRenyi(20),
    PowerLaw(20),
    WattsStrogatz(20),
    Hybrid(2, WattsStrogatz(20, rewire_prob=0.0)),
):
    g = generate_graph(fam, 7)
    g2 = generate_graph(fam, 7)
    assert g == g2, fam
    degs = [len(g.neighbors(v)) for v in range(g.p)]
    print(
        type(fam).__name__,
        "edges:", g.edge_count(),
        "dag:", is_dag(g),
        "maxdeg:", max(degs),
    )

# degree scaling: PL max degree grows with p, ER stays single-digit-ish
for p in (100, 200):
    er = [
        max(len(generate_graph(ErdosRenyi(p), s).neighbors(v)) for v in range(p))
        for s in range(20)
    ]
    pl = [
        max(len(generate_graph(PowerLaw(p), s).neighbors(v)) for v in range(p))
        for s in range(20)
    ]
    print(f"p={p} ER median maxdeg {np.median(er)}  PL median maxdeg {np.median(pl)}")

cfg = ExperimentConfig(family=ErdosRenyi(20), p=20, replicates=5, seed=3)
inst = make_instance(cfg, 0)
print("instance: mag p", inst.mag.p, "pag edges", inst.pag.edge_count(),
      "data shape", inst.data.shape)
inst2 = make_instance(cfg, 0)
assert inst2.mag == inst.mag and inst2.pag == inst.pag
assert np.array_equal(inst2.model.B, inst.model.B)

m = skeleton_metrics(skeleton(inst.mag), inst.mag)
print("self metrics:", m.precision, m.recall)
print("self shd:", shd_and_marks(inst.pag, inst.pag), "dshd:", dshd(inst.pag, inst.pag))

t0 = time.time()
rows = oracle_experiment(cfg)
print(f"oracle_experiment ({time.time()-t0:.1f}s):")
for row in rows:
    print("  ", {k: (round(v, 4) if isinstance(v, float) else v) for k, v in row.items()})
write_csv("/tmp/oracle.csv", rows, ORACLE_COLUMNS)
print(open("/tmp/oracle.csv").read())

cfg_pr = ExperimentConfig(
    family=ErdosRenyi(20), p=20, n=400,
    alpha_grid=(1e-10, 1e-4, 1e-2), replicates=3, seed=5,
)
t0 = time.time()
rows = pr_sweep(cfg_pr)
print(f"pr_sweep ({time.time()-t0:.1f}s):")
for row in rows:
    print("  ", {k: (round(v, 3) if isinstance(v, float) else v) for k, v in row.items()})
write_csv("/tmp/pr.csv", rows, PR_COLUMNS)

tc = TrekConfig(family=ErdosRenyi(20), weights="uniform", replicates=10, seed=1)
gs = min_gamma_short_trek(tc)
print("min gamma (uniform):", gs)
tc = TrekConfig(family=ErdosRenyi(20), weights="normal", replicates=10, seed=1)
print("min gamma (normal):", min_gamma_short_trek(tc))

cfg_mm = ExperimentConfig(family=ErdosRenyi(40), p=40, gamma=5, replicates=20, seed=9)
print("local moral equality ER p=40 gamma=5:", local_moral_equality(cfg_mm))
