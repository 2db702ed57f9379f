import numpy as np

from lfci.citest import GraphOracle
from lfci.discovery import (
    Fci, Gamma, LfciLocal, LocalSeparationOracle, Standard, fci, lfci,
    lfci_mb, orient, pc, skeleton_search,
)
from lfci.mixed_graph import CIRCLE, HEAD, TAIL, MixedGraph, from_edges, skeleton
from lfci.projection import Partition, latent_project, true_pag
from lfci.separation import UNBOUNDED, moral_graph

rng = np.random.default_rng(20260815)


def random_dag(p, prob, rng):
    edges = []
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < prob:
                edges.append((i, j, TAIL, HEAD))
    return from_edges(p, edges)


def edge_set(g):
    return sorted((e.a, e.b, int(e.mark_at_a), int(e.mark_at_b)) for e in g.edges())


n_trials = 250
fails = {"fci_vs_true": 0, "lfci_sat": 0, "mb": 0, "sound": 0, "mreach": 0,
         "relabel": 0, "dag_heads": 0}
sound_checked = 0
mb_checked = 0

for trial in range(n_trials):
    p_all = int(rng.integers(5, 9))
    n_lat = int(rng.integers(1, 3))
    dag = random_dag(p_all, float(rng.uniform(0.25, 0.5)), rng)
    lat = set(int(v) for v in rng.choice(p_all, size=n_lat, replace=False))
    obs = frozenset(range(p_all)) - lat
    mag = latent_project(dag, Partition(obs, frozenset(lat), frozenset()))
    p = mag.p
    if p < 3:
        continue

    tp = true_pag(mag)

    pag_f, sep_f, st_f = fci(GraphOracle(mag), p)
    if edge_set(pag_f) != edge_set(tp):
        fails["fci_vs_true"] += 1
        if fails["fci_vs_true"] == 1:
            print("FCI mismatch trial", trial)
            print(" mag :", edge_set(mag))
            print(" true:", edge_set(tp))
            print(" fci :", edge_set(pag_f))

    pag_s, sep_s, st_s = lfci(LocalSeparationOracle(mag, p), p, eta=p, gamma=p)
    if edge_set(pag_s) != edge_set(tp):
        fails["lfci_sat"] += 1
        if fails["lfci_sat"] == 1:
            print("lfci saturated mismatch trial", trial)
            print(" mag :", edge_set(mag))
            print(" true:", edge_set(tp))
            print(" lfci:", edge_set(pag_s))

    moral = moral_graph(mag, UNBOUNDED)
    pag_m, sep_m, st_m = lfci_mb(
        LocalSeparationOracle(mag, p), p, eta=p, gamma=p, moral=moral
    )
    mb_checked += 1
    if edge_set(pag_m) != edge_set(tp):
        fails["mb"] += 1
        if fails["mb"] <= 2:
            print("lfci_mb mismatch trial", trial)
            print(" mag  :", edge_set(mag))
            print(" moral:", edge_set(moral))
            print(" true :", edge_set(tp))
            print(" mb   :", edge_set(pag_m))

    # small-budget run: soundness of non-circle marks when skeleton is right
    gamma = 3
    eta = 2
    t = LocalSeparationOracle(mag, gamma)
    pag_l, sep_l, st_l = lfci(t, p, eta=eta, gamma=gamma)
    if st_l.m_reach > eta:
        fails["mreach"] += 1
    if edge_set(skeleton(pag_l)) == edge_set(skeleton(mag)):
        sound_checked += 1
        tp_marks = {(e.a, e.b): (e.mark_at_a, e.mark_at_b) for e in tp.edges()}
        for e in pag_l.edges():
            ta, tb = tp_marks[(e.a, e.b)]
            if e.mark_at_a != CIRCLE and e.mark_at_a != ta:
                fails["sound"] += 1
                break
            if e.mark_at_b != CIRCLE and e.mark_at_b != tb:
                fails["sound"] += 1
                break

    # relabeling equivariance for the small-budget pipeline
    perm = list(rng.permutation(p))
    mag_rel = mag.relabel(perm)
    t2 = LocalSeparationOracle(mag_rel, gamma)
    pag_r, sep_r, st_r = lfci(t2, p, eta=eta, gamma=gamma)
    if edge_set(pag_r) != edge_set(pag_l.relabel(perm)):
        fails["relabel"] += 1
        if fails["relabel"] == 1:
            print("relabel mismatch trial", trial, "perm", perm)

    # DAG (no latents): fci arrowheads match pc arrowheads
    pag_d, _, _ = fci(GraphOracle(dag), p_all)
    cp_d, _, _ = pc(GraphOracle(dag), p_all, Standard())
    cp_marks = {(e.a, e.b): (e.mark_at_a, e.mark_at_b) for e in cp_d.edges()}
    if sorted((e.a, e.b) for e in pag_d.edges()) != sorted(cp_marks):
        fails["dag_heads"] += 1
    else:
        for e in pag_d.edges():
            ca, cb = cp_marks[(e.a, e.b)]
            if (e.mark_at_a == HEAD) != (ca == HEAD) or (e.mark_at_b == HEAD) != (cb == HEAD):
                fails["dag_heads"] += 1
                if fails["dag_heads"] == 1:
                    print("dag head mismatch trial", trial, e, ca, cb)
                break

print("trials:", n_trials, "sound_checked:", sound_checked, "mb_checked:", mb_checked)
print("fails:", fails)
