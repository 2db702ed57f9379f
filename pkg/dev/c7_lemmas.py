"""Criterion-7 pre-run: separator-size lemma checks on small random
instances, with premise resampling counters and timing."""

import sys
import time

import numpy as np

from lfci.mixed_graph import HEAD, TAIL, from_edges, skeleton
from lfci.projection import Partition, latent_project
from lfci.separation import (
    CapExceeded,
    L_gamma,
    L_mb,
    count_short_paths,
    moral_graph,
)
from lfci.simbench import ErdosRenyi, generate_graph

REPS = int(sys.argv[1]) if len(sys.argv) > 1 else 50
SEED = 777


def child(case, r):
    return np.random.SeedSequence(entropy=SEED, spawn_key=(case, r))


def eta_star(skel, gamma):
    worst = 0
    for i in range(skel.p):
        for j in range(i + 1, skel.p):
            if skel.adjacent(i, j):
                continue
            worst = max(worst, count_short_paths(skel, i, j, gamma))
    return max(worst, 1)


def induced_skeleton(g, keep):
    keep = sorted(keep)
    idx = {v: k for k, v in enumerate(keep)}
    edges = []
    for a in keep:
        for b in keep:
            if a < b and g.adjacent(a, b):
                edges.append((idx[a], idx[b], TAIL, TAIL))
    return from_edges(len(keep), edges)


def random_dag(rng_seed, p, deg):
    return generate_graph(ErdosRenyi(p, avg_degree=deg), rng_seed)


def random_mag(rng_seed, p_obs, n_lat, deg):
    dag = random_dag(rng_seed, p_obs + n_lat, deg)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=SEED, spawn_key=(99, p_obs, n_lat)))
    lat = set(int(v) for v in rng.choice(dag.p, size=n_lat, replace=False))
    part = Partition(observed=set(range(dag.p)) - lat, latent=lat, selection=set())
    return latent_project(dag, part)


def cycle_overlay(rng, p, delta):
    cyc = [(i, (i + 1) % p) for i in range(p)]
    cyc_set = {tuple(sorted(e)) for e in cyc}
    ov_deg = [0] * p
    overlay = set()
    want = p // 3
    tries = 0
    while len(overlay) < want and tries < 200:
        tries += 1
        a, b = sorted(int(v) for v in rng.choice(p, size=2, replace=False))
        if (a, b) in cyc_set or (a, b) in overlay:
            continue
        if ov_deg[a] >= delta or ov_deg[b] >= delta:
            continue
        overlay.add((a, b))
        ov_deg[a] += 1
        ov_deg[b] += 1
    und = sorted(cyc_set | overlay)
    order = rng.permutation(p)
    rank = np.empty(p, dtype=np.int64)
    rank[order] = np.arange(p)
    edges = []
    for a, b in und:
        if rank[a] < rank[b]:
            edges.append((a, b, TAIL, HEAD))
        else:
            edges.append((b, a, TAIL, HEAD))
    return from_edges(p, edges), overlay


def case_dag(r):
    rng = np.random.default_rng(child(0, r))
    p = int(rng.integers(10, 13))
    gamma = int(rng.integers(2, 5))
    deg = float(rng.choice([1.5, 2.0, 2.5]))
    g = random_dag(child(0, r).spawn(1)[0], p, deg)
    eta = eta_star(skeleton(g), gamma)
    got = L_gamma(g, gamma, eta)
    return eta, got


def case_mag(r, eta_cap):
    attempts = 0
    rng = np.random.default_rng(child(1, r))
    while True:
        attempts += 1
        p_obs = int(rng.integers(10, 13))
        n_lat = int(rng.integers(3, 5))
        gamma = int(rng.integers(2, 5))
        mag = random_mag(child(1, r).spawn(attempts)[0], p_obs, n_lat, 2.0)
        eta = eta_star(skeleton(mag), gamma)
        if eta <= eta_cap:
            return mag, gamma, eta, attempts


def case_hybrid(r):
    rng = np.random.default_rng(child(3, r))
    p = int(rng.integers(10, 13))
    delta = int(rng.integers(1, 3))
    gamma = int(rng.integers(3, 5))
    g, overlay = cycle_overlay(rng, p, delta)
    ov_nodes = set()
    for a, b in overlay:
        ov_nodes.add(a)
        ov_nodes.add(b)
    skel = skeleton(g)
    # verify the theorem premise with the canonical overlay-incident M
    for i in range(p):
        for j in range(i + 1, p):
            if g.adjacent(i, j):
                continue
            m = ov_nodes - {i, j}
            part1 = induced_skeleton(skel, m | {i, j})
            degs = [len(list(part1.neighbors(v))) for v in range(part1.p)]
            assert max(degs, default=0) <= delta + 2, (r, i, j, degs)
            part2 = induced_skeleton(skel, set(range(p)) - m)
            assert eta_star(part2, gamma) <= 2, (r, i, j)
    got = L_gamma(g, gamma, delta + 4)
    got_mb = L_mb(g, gamma, delta + 3)
    return delta, got, got_mb


t0 = time.time()
worst = 0
for r in range(REPS):
    eta, got = case_dag(r)
    assert got <= eta, (r, eta, got)
    worst = max(worst, got)
print(f"lemma2 dag: {REPS} ok, max L={worst} [{time.time()-t0:.1f}s]", flush=True)

t0 = time.time()
worst = 0
att_tot = 0
for r in range(REPS):
    mag, gamma, eta, att = case_mag(r, 3)
    att_tot += att
    got = L_gamma(mag, gamma, eta)
    assert got <= eta, (r, eta, got)
    worst = max(worst, got)
print(f"lemma3 mag: {REPS} ok, max L={worst}, attempts={att_tot} [{time.time()-t0:.1f}s]", flush=True)

t0 = time.time()
worst = 0
att_tot = 0
for r in range(REPS):
    mag, gamma, eta, att = case_mag(r, 4)
    att_tot += att
    cap = max(0, eta - 1)
    got = L_mb(mag, gamma, cap)
    assert got <= cap, (r, eta, got)
    worst = max(worst, got)
print(f"lemma4 blanket: {REPS} ok, max L_mb={worst}, attempts={att_tot} [{time.time()-t0:.1f}s]", flush=True)

t0 = time.time()
worst = worst_mb = 0
for r in range(REPS):
    delta, got, got_mb = case_hybrid(r)
    assert got <= delta + 4 and got_mb <= delta + 3, (r, delta, got, got_mb)
    worst = max(worst, got)
    worst_mb = max(worst_mb, got_mb)
print(f"theorem1 hybrid: {REPS} ok, max L={worst}, max L_mb={worst_mb} [{time.time()-t0:.1f}s]", flush=True)
