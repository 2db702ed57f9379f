"""Shared graph fixtures for the test suite.

Three hand-built graphs exercise specific structural features:

* ``two_sink_hub_dag``: a DAG where the smallest separator of the two sinks
  that only uses nodes near both of them has size three, so it distinguishes
  separator notions based on local graphs from ones based on short paths.
* ``bidirected_chain_with_child``: a bidirected chain whose interior nodes
  all point into one extra child; bounded-size searches and full searches
  disagree on one edge mark of this graph.
* ``two_cluster_mag``: a 13-node maximal ancestral graph with two bidirected
  clusters joined through directed paths; the endpoints (0, 7) are
  non-adjacent but every separator for them contains nodes far from the
  pair, so locality budgets change the discovered separator.
"""

import numpy as np

from lfci.mixed_graph import HEAD, TAIL, from_edges

H, T = HEAD, TAIL


def two_sink_hub_dag():
    """DAG on 7 nodes: sources 1..5 feed the two sinks 0 and 6 through the
    hub 3.  {2, 3, 5} is a 3-local separator of (0, 6); {3} alone is not."""
    edges = [
        (1, 0, T, H), (1, 3, T, H), (2, 3, T, H), (2, 6, T, H),
        (3, 0, T, H), (3, 6, T, H), (4, 0, T, H), (4, 3, T, H),
        (5, 3, T, H), (5, 6, T, H),
    ]
    return from_edges(7, edges)


def bidirected_chain_with_child():
    """Bidirected chain 0 <-> 1 <-> ... <-> 5 with 1..5 all parents of 6."""
    edges = [
        (0, 1, H, H), (1, 2, H, H), (2, 3, H, H), (3, 4, H, H), (4, 5, H, H),
        (1, 6, T, H), (2, 6, T, H), (3, 6, T, H), (4, 6, T, H), (5, 6, T, H),
    ]
    return from_edges(7, edges)


def two_cluster_mag():
    """13-node MAG with bidirected clusters {0,1,2} and {5,6,7} and a
    directed periphery 10 -> 8 -> 0, 10 <-> 11 -> 12 -> 9 -> 7."""
    edges = [
        (0, 1, H, H), (1, 2, H, H), (6, 7, H, H), (5, 6, H, H),
        (1, 3, T, H), (2, 3, T, H), (6, 4, T, H), (5, 4, T, H),
        (4, 0, T, H), (3, 7, T, H), (8, 0, T, H), (9, 7, T, H),
        (10, 8, T, H), (10, 11, H, H), (11, 12, T, H), (12, 9, T, H),
    ]
    return from_edges(13, edges)


def random_dag(p, prob, rng):
    """Erdos-Renyi DAG oriented along the node order."""
    edges = []
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < prob:
                edges.append((i, j, T, H))
    return from_edges(p, edges)


def edge_set(g):
    """Canonical sortable form of a graph's edges with marks."""
    return sorted(
        (e.a, e.b, int(e.mark_at_a), int(e.mark_at_b)) for e in g.edges()
    )


def random_mag(rng, p_low=5, p_high=9, lat_low=1, lat_high=3):
    """Latent projection of a random DAG; returns (dag, partition, mag)."""
    from lfci.projection import Partition, latent_project

    p_all = int(rng.integers(p_low, p_high))
    n_lat = int(rng.integers(lat_low, lat_high))
    dag = random_dag(p_all, float(rng.uniform(0.25, 0.5)), rng)
    lat = set(int(v) for v in rng.choice(p_all, size=n_lat, replace=False))
    part = Partition(
        observed=frozenset(range(p_all)) - lat,
        latent=frozenset(lat),
        selection=frozenset(),
    )
    return dag, part, latent_project(dag, part)
