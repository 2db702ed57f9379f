import itertools

import numpy as np

from lfci.citest import GraphOracle
from lfci.discovery import Standard, fci, pc
from lfci.mixed_graph import (
    CIRCLE, HEAD, TAIL, MixedGraph, from_edges, is_ancestral, is_dag, skeleton,
)
from lfci.projection import true_pag
from lfci.separation import m_separated

rng = np.random.default_rng(20260815)


def random_dag(p, prob, rng):
    edges = []
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < prob:
                edges.append((i, j, TAIL, HEAD))
    return from_edges(p, edges)


p_all = int(rng.integers(5, 9))
n_lat = int(rng.integers(1, 3))
dag = random_dag(p_all, float(rng.uniform(0.25, 0.5)), rng)
print("p:", p_all, "edges:", [(e.a, e.b) for e in dag.edges()])

pag, _, _ = fci(GraphOracle(dag), p_all)
cp, _, _ = pc(GraphOracle(dag), p_all, Standard())
tp = true_pag(dag)
print("fci :", [(e.a, e.b, e.mark_at_a.name[0], e.mark_at_b.name[0]) for e in pag.edges()])
print("tpag:", [(e.a, e.b, e.mark_at_a.name[0], e.mark_at_b.name[0]) for e in tp.edges()])
print("pc  :", [(e.a, e.b, e.mark_at_a.name[0], e.mark_at_b.name[0]) for e in cp.edges()])


def sep_signature(g):
    sig = []
    nodes = range(g.p)
    for i, j in itertools.combinations(nodes, 2):
        others = [v for v in nodes if v not in (i, j)]
        for r in range(len(others) + 1):
            for s in itertools.combinations(others, r):
                sig.append(bool(m_separated(g, i, j, set(s))))
    return tuple(sig)


base_sig = sep_signature(dag)
skel_edges = [(e.a, e.b) for e in skeleton(dag).edges()]
m = len(skel_edges)

# all Markov-equivalent DAGs with the same skeleton
dag_marks = {}
mag_marks = {}
n_dags = 0
n_mags = 0
types = [(TAIL, HEAD), (HEAD, TAIL), (HEAD, HEAD)]
for combo in itertools.product(range(3), repeat=m):
    edges = [
        (a, b, *types[t]) for (a, b), t in zip(skel_edges, combo)
    ]
    g = from_edges(p_all, edges)
    if not is_ancestral(g):
        continue
    if sep_signature(g) != base_sig:
        continue
    n_mags += 1
    for e in g.edges():
        key = (e.a, e.b)
        mag_marks.setdefault(key, set()).add((e.mark_at_a, e.mark_at_b))
    if is_dag(g):
        n_dags += 1
        for e in g.edges():
            key = (e.a, e.b)
            dag_marks.setdefault(key, set()).add((e.mark_at_a, e.mark_at_b))

print("equivalent DAGs:", n_dags, " MAGs:", n_mags)
for key in sorted(skel_edges):
    print(key, "dag orientations:", sorted(dag_marks[key]),
          " mag orientations:", sorted(mag_marks[key]))
