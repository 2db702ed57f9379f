import itertools

import numpy as np

from lfci.citest import GraphOracle
from lfci.discovery import Standard, fci, pc
from lfci.mixed_graph import HEAD, TAIL, from_edges, is_dag, skeleton

rng = np.random.default_rng(20260815)


def random_dag(p, prob, rng):
    edges = []
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < prob:
                edges.append((i, j, TAIL, HEAD))
    return from_edges(p, edges)


def vstructs(g):
    out = set()
    for b in range(g.p):
        for a, c in itertools.combinations(g.neighbors(b), 2):
            if g.adjacent(a, c):
                continue
            if g.mark_at(b, a) == HEAD and g.mark_at(b, c) == HEAD:
                out.add((min(a, c), b, max(a, c)))
    return out


p_all = int(rng.integers(5, 9))
n_lat = int(rng.integers(1, 3))
dag = random_dag(p_all, float(rng.uniform(0.25, 0.5)), rng)
print("p:", p_all, "edges:", [(e.a, e.b) for e in dag.edges()])

pag, _, _ = fci(GraphOracle(dag), p_all)
cp, _, _ = pc(GraphOracle(dag), p_all, Standard())
print("fci :", [(e.a, e.b, e.mark_at_a.name[0], e.mark_at_b.name[0]) for e in pag.edges()])
print("pc  :", [(e.a, e.b, e.mark_at_a.name[0], e.mark_at_b.name[0]) for e in cp.edges()])

base_v = vstructs(dag)
skel_edges = [(e.a, e.b) for e in skeleton(dag).edges()]
m = len(skel_edges)
marks = {}
n_eq = 0
for combo in itertools.product((0, 1), repeat=m):
    edges = [
        (a, b, TAIL, HEAD) if t == 0 else (a, b, HEAD, TAIL)
        for (a, b), t in zip(skel_edges, combo)
    ]
    g = from_edges(p_all, edges)
    if not is_dag(g):
        continue
    if vstructs(g) != base_v:
        continue
    n_eq += 1
    for e in g.edges():
        marks.setdefault((e.a, e.b), set()).add((int(e.mark_at_a), int(e.mark_at_b)))

print("equivalent DAGs:", n_eq)
for key in sorted(skel_edges):
    print(key, "orientations:", sorted(marks[key]))
