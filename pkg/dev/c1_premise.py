"""Criterion-1 design check: does recovery_premise exactly predict oracle
recovery per replicate, and what is the violation rate per cell?"""

import time

from lfci.citest import GraphOracle
from lfci.discovery import lfci, lfci_mb
from lfci.separation import moral_graph
from lfci.simbench import (
    ErdosRenyi,
    ExperimentConfig,
    PowerLaw,
    WattsStrogatz,
    make_instance,
    recovery_premise,
)

CELLS = [
    (ErdosRenyi(20), 20, 100),
    (ErdosRenyi(50), 50, 100),
    (PowerLaw(20), 20, 60),
    (PowerLaw(50), 50, 60),
    (WattsStrogatz(20), 20, 60),
    (WattsStrogatz(50), 50, 60),
]

t_all = time.time()
for family, p, reps in CELLS:
    cfg = ExperimentConfig(family=family, p=p, eta=3, gamma=6, replicates=reps, seed=p)
    t0 = time.time()
    viol = viol_mb = 0
    mism = []
    first50_viol = first50_viol_mb = 0
    for r in range(reps):
        inst = make_instance(cfg, r)
        mor = moral_graph(inst.mag)
        prem = recovery_premise(inst.mag, cfg.gamma, cfg.eta)
        prem_mb = recovery_premise(inst.mag, cfg.gamma, cfg.eta, moral=mor)
        out, _, _ = lfci(GraphOracle(inst.mag), inst.mag.p, cfg.eta, cfg.gamma)
        out_mb, _, _ = lfci_mb(GraphOracle(inst.mag), inst.mag.p, cfg.eta, cfg.gamma, mor)
        rec = out == inst.pag
        rec_mb = out_mb == inst.pag
        if not prem:
            viol += 1
            if r < 50:
                first50_viol += 1
        if not prem_mb:
            viol_mb += 1
            if r < 50:
                first50_viol_mb += 1
        if prem != rec or prem_mb != rec_mb:
            mism.append((r, prem, rec, prem_mb, rec_mb))
    name = type(family).__name__
    print(
        f"{name} p={p}: viol lfci {viol}/{reps} (first50 {first50_viol}) "
        f"mb {viol_mb}/{reps} (first50 {first50_viol_mb}) "
        f"mismatches={mism} [{time.time() - t0:.1f}s]",
        flush=True,
    )
print(f"total {time.time() - t_all:.1f}s", flush=True)
