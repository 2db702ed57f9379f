import numpy as np

from lfci.citest import GraphOracle
from lfci.discovery import (
    AllNodes, Fci, Gamma, LfciLocal, LocalSeparationOracle, Neighborhood,
    PossibleDsep, Reduced, SkeletonState, Standard, fci, lfci, lfci_mb,
    orient, pc, pool, possible_d_sep, skeleton_search,
)
from lfci.mixed_graph import CIRCLE, HEAD, TAIL, MixedGraph, from_edges, skeleton
from lfci.separation import UNBOUNDED, m_separated, moral_graph

H, T = HEAD, TAIL


def fig4():
    edges = [
        (0, 1, H, H), (1, 2, H, H), (6, 7, H, H), (5, 6, H, H),
        (1, 3, T, H), (2, 3, T, H), (6, 4, T, H), (5, 4, T, H),
        (4, 0, T, H), (3, 7, T, H), (8, 0, T, H), (9, 7, T, H),
        (10, 8, T, H), (10, 11, H, H), (11, 12, T, H), (12, 9, T, H),
    ]
    return from_edges(13, edges)


def fig3():
    edges = [
        (0, 1, H, H), (1, 2, H, H), (2, 3, H, H), (3, 4, H, H), (4, 5, H, H),
        (1, 6, T, H), (2, 6, T, H), (3, 6, T, H), (4, 6, T, H), (5, 6, T, H),
    ]
    return from_edges(7, edges)


g4 = fig4()
true_skel4 = skeleton(g4)

# pool examples on the true skeleton snapshot
state = SkeletonState(C=true_skel4, C_old=true_skel4)
p4 = pool(Gamma(4), state, 0, 7)
p3 = pool(Gamma(3), state, 0, 7)
print("pool gamma=4 (0,7):", sorted(p4), "expect [1,2,3,4,5,6]")
print("pool gamma=3 (0,7):", sorted(p3), "expect [1,3,4,6]")

# skeleton search with the local separation oracle, gamma=3, eta=2
for gamma, want in ((3, {1, 4}), (4, {3, 4})):
    t = LocalSeparationOracle(g4, gamma)
    skel, sep, stats = skeleton_search(t, 13, Gamma(gamma), eta=2)
    same = sorted(skel.edges()) == sorted(true_skel4.edges())
    print(f"gamma={gamma}: skeleton==true: {same}  sep(0,7)={sorted(sep.get((0,7), set()))} "
          f"expect {sorted(want)}  m_reach={stats.m_reach} n_tests={stats.n_tests}")
    # batch equality
    t2 = LocalSeparationOracle(g4, gamma)
    skel_b, sep_b, stats_b = skeleton_search(t2, 13, Gamma(gamma), eta=2, level_batch=True)
    print("  batch equal:", sorted(skel_b.edges()) == sorted(skel.edges()),
          sep_b == sep, stats_b.m_reach == stats.m_reach)

# fci on fig4 with a plain m-separation oracle
t = GraphOracle(g4)
pag4, sep4, stats4 = fci(t, 13)
print("fci skeleton==true:", sorted(skeleton(pag4).edges()) == sorted(true_skel4.edges()))
print("fci sep(0,7):", sorted(sep4.get((0, 7), set())), "expect [1,2,4,8]")

# fig3: local pipeline leaves y o-> j, global fci orients y -> j
g3 = fig3()
t = LocalSeparationOracle(g3, 5)
pag3, sep3, stats3 = lfci(t, 7, eta=4, gamma=5)
print("lfci fig3 skeleton==true:", sorted(skeleton(pag3).edges()) == sorted(skeleton(g3).edges()))
print("lfci sep(0,6):", sorted(sep3.get((0, 6), set())), "expect [1,2,3,4]")
print("lfci (5,6) marks: at5=", pag3.mark_at(5, 6).name, "(want CIRCLE) at6=",
      pag3.mark_at(6, 5).name, "(want HEAD)")

t = GraphOracle(g3)
pag3f, sep3f, _ = fci(t, 7)
print("fci  sep(0,6):", sorted(sep3f.get((0, 6), set())), "expect [1,2,3,4,5]")
print("fci  (5,6) marks: at5=", pag3f.mark_at(5, 6).name, "(want TAIL) at6=",
      pag3f.mark_at(6, 5).name, "(want HEAD)")
print("fci  (4,5) marks: at4=", pag3f.mark_at(4, 5).name, "at5=", pag3f.mark_at(5, 4).name)

# pc sanity: chain has no v-structure, collider does
chain = from_edges(3, [(0, 1, T, H), (1, 2, T, H)])
t = GraphOracle(chain)
cp, _, _ = pc(t, 3, Standard())
print("pc chain marks:", [(e.a, e.b, e.mark_at_a.name, e.mark_at_b.name) for e in cp.edges()])
coll = from_edges(3, [(0, 2, T, H), (1, 2, T, H)])
t = GraphOracle(coll)
cp2, _, _ = pc(t, 3, Standard())
print("pc collider marks:", [(e.a, e.b, e.mark_at_a.name, e.mark_at_b.name) for e in cp2.edges()])
t = GraphOracle(coll)
cp3, _, st3 = pc(t, 3, Reduced(1))
print("rpc collider same:", sorted(cp3.edges()) == sorted(cp2.edges()))

# possible_d_sep basic: collider chain makes everything reachable
pds_g = from_edges(4, [(0, 1, H, H), (1, 2, H, H), (2, 3, T, H)])
print("pds(0):", sorted(possible_d_sep(pds_g, 0)), "expect [1,2] (3 not via collider at 2? check)")
