"""m-separation, local graphs, local separators, blankets, and the
separator-size statistics."""

import itertools

import numpy as np
import pytest

from lfci.errors import (
    AdjacentPair,
    CapExceeded,
    CircleMarkPresent,
    GraphTooLarge,
    InvalidConditioningSet,
)
from lfci.mixed_graph import (
    CIRCLE,
    HEAD,
    TAIL,
    from_directed_edges,
    from_edges,
    skeleton,
    simple_paths,
)
from lfci.separation import (
    UNBOUNDED,
    L_gamma,
    L_mb,
    SeparatorQuery,
    count_short_paths,
    d_sep,
    find_local_separator,
    has_local_path_property,
    is_local_separator,
    is_maximal,
    local_graph,
    m_separated,
    m_separated_bruteforce,
    markov_blanket,
    moral_graph,
)

from fixtures import (
    bidirected_chain_with_child,
    random_dag,
    random_mag,
    two_cluster_mag,
    two_sink_hub_dag,
)

H, T = HEAD, TAIL


class TestMSeparation:
    def test_chain_and_collider(self):
        chain = from_directed_edges(3, [(0, 1), (1, 2)])
        assert not m_separated(chain, 0, 2, set())
        assert m_separated(chain, 0, 2, {1})
        collider = from_directed_edges(3, [(0, 2), (1, 2)])
        assert m_separated(collider, 0, 1, set())
        assert not m_separated(collider, 0, 1, {2})

    def test_conditioning_on_collider_descendant_opens(self):
        g = from_directed_edges(4, [(0, 2), (1, 2), (2, 3)])
        assert m_separated(g, 0, 1, set())
        assert not m_separated(g, 0, 1, {3})

    def test_bidirected_paths_block_without_conditioning(self):
        g = bidirected_chain_with_child()
        # every interior node of the chain is a collider on the chain path
        assert m_separated(g, 0, 5, set())
        assert not m_separated(g, 0, 2, {1})
        # conditioning on the common child opens the whole chain
        assert not m_separated(g, 0, 5, {1, 2, 3, 4, 6})

    def test_validation_errors(self):
        g = two_sink_hub_dag()
        with pytest.raises(InvalidConditioningSet):
            m_separated(g, 0, 0, set())
        with pytest.raises(InvalidConditioningSet):
            m_separated(g, 0, 6, {0})
        with pytest.raises(InvalidConditioningSet):
            m_separated(g, 0, 6, {99})
        with pytest.raises(InvalidConditioningSet):
            m_separated(g, -1, 6, set())
        with pytest.raises(CircleMarkPresent):
            m_separated(from_edges(2, [(0, 1, CIRCLE, HEAD)]), 0, 1, set())

    def test_bruteforce_node_limit(self):
        from lfci.mixed_graph import complete_undirected

        with pytest.raises(GraphTooLarge):
            m_separated_bruteforce(complete_undirected(21), 0, 1, set())

    def test_matches_bruteforce_on_random_mags(self):
        rng = np.random.default_rng(20260815)
        for _ in range(40):
            _, _, mag = random_mag(rng)
            if mag.p < 3:
                continue
            pairs = list(itertools.combinations(range(mag.p), 2))
            others = lambda i, j: [v for v in range(mag.p) if v not in (i, j)]
            for i, j in pairs:
                rest = others(i, j)
                for size in range(min(3, len(rest)) + 1):
                    for s in itertools.combinations(rest, size):
                        assert m_separated(mag, i, j, set(s)) == \
                            m_separated_bruteforce(mag, i, j, set(s))

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            _, _, mag = random_mag(rng)
            if mag.p < 3:
                continue
            i, j = rng.choice(mag.p, size=2, replace=False)
            i, j = int(i), int(j)
            s = {int(v) for v in range(mag.p) if v not in (i, j) and rng.random() < 0.3}
            assert m_separated(mag, i, j, s) == m_separated(mag, j, i, s)


class TestLocalGraph:
    def test_full_at_large_gamma(self):
        g = two_sink_hub_dag()
        lg = local_graph(g, 0, 6, 3)
        assert lg.node_subset == frozenset(range(7))
        assert lg.induced == g
        assert lg.anchor == (0, 6)

    def test_shrinks_at_small_gamma(self):
        g = two_sink_hub_dag()
        lg = local_graph(g, 0, 6, 2)
        # only the hub lies on a length-2 path between the sinks
        assert lg.node_subset == frozenset({0, 3, 6})
        assert lg.induced.edge_count() == 2
        # nodes outside the subset are isolated but keep their indices
        assert lg.induced.p == 7
        assert lg.induced.neighbors(1) == ()

    def test_nodes_require_paths_not_just_distance(self):
        # 0 - 1 - 2 chain plus a pendant 3 off node 1: 3 is within distance
        # 2 of both ends but lies on no path between them
        g = from_edges(4, [(0, 1, T, H), (1, 2, T, H), (1, 3, T, H)])
        lg = local_graph(g, 0, 2, 4)
        assert lg.node_subset == frozenset({0, 1, 2})

    def test_same_endpoints_rejected(self):
        with pytest.raises(InvalidConditioningSet):
            local_graph(two_sink_hub_dag(), 3, 3, 2)


class TestShortPathCounts:
    def test_count_matches_enumeration(self):
        g = skeleton(two_sink_hub_dag())
        for gamma in (1, 2, 3, 6):
            want = sum(
                1 for p in simple_paths(g, 0, 6) if len(p) - 1 <= gamma
            )
            assert count_short_paths(g, 0, 6, gamma) == want

    def test_stop_short_circuits(self):
        g = skeleton(two_sink_hub_dag())
        full = count_short_paths(g, 0, 6, 3)
        assert full == 5
        assert count_short_paths(g, 0, 6, 3, stop=2) == 3  # stops at stop+1

    def test_local_path_property_threshold(self):
        g = skeleton(two_sink_hub_dag())
        # the busiest non-adjacent pair has exactly five short paths
        counts = [
            count_short_paths(g, i, j, 3)
            for i in range(7)
            for j in range(i + 1, 7)
            if not g.adjacent(i, j)
        ]
        assert max(counts) == 5
        assert has_local_path_property(g, 5, 3)
        assert not has_local_path_property(g, 4, 3)


class TestLocalSeparators:
    def test_known_separator_verifies(self):
        g = two_sink_hub_dag()
        assert is_local_separator(g, 0, 6, {2, 3, 5}, 3)
        assert not is_local_separator(g, 0, 6, {3}, 3)
        assert not is_local_separator(g, 0, 6, set(), 3)

    def test_separator_outside_local_graph_rejected(self):
        g = two_sink_hub_dag()
        # at gamma=2 the local graph is {0, 3, 6}, so 2 is not eligible
        assert not is_local_separator(g, 0, 6, {2, 3}, 2)
        assert is_local_separator(g, 0, 6, {3}, 2)

    def test_find_scans_size_then_lexicographic(self):
        g = two_sink_hub_dag()
        # both {1,3,4} and {2,3,5} are minimum local separators; the scan
        # order makes the lexicographically first one deterministic
        assert find_local_separator(g, SeparatorQuery(0, 6, 3, 3)) == {1, 3, 4}
        assert find_local_separator(g, SeparatorQuery(0, 6, 3, 2)) is None

    def test_find_empty_separator(self):
        collider = from_directed_edges(3, [(0, 2), (1, 2)])
        assert find_local_separator(collider, SeparatorQuery(0, 1, 2, 1)) == set()

    def test_find_rejects_adjacent_pair(self):
        with pytest.raises(AdjacentPair):
            find_local_separator(two_sink_hub_dag(), SeparatorQuery(0, 3, 3, 2))

    def test_found_separators_verify(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            _, _, mag = random_mag(rng)
            if mag.p < 4:
                continue
            for i in range(mag.p):
                for j in range(i + 1, mag.p):
                    if mag.adjacent(i, j):
                        continue
                    s = find_local_separator(mag, SeparatorQuery(i, j, 3, 4))
                    if s is not None:
                        assert is_local_separator(mag, i, j, s, 3)


class TestSeparatorStatistics:
    def test_L_gamma_on_hub_dag(self):
        g = two_sink_hub_dag()
        assert L_gamma(g, 3, 3) == 3
        # (0, 2) also needs three nodes and is scanned before (0, 6)
        with pytest.raises(CapExceeded) as exc:
            L_gamma(g, 3, 2)
        assert exc.value.pair == (0, 2)
        assert find_local_separator(g, SeparatorQuery(0, 2, 3, 3)) == {1, 3, 4}

    def test_L_mb_skips_morally_nonadjacent_pairs(self):
        g = two_sink_hub_dag()
        # (0, 6) never enters the blanket-restricted statistic, and all
        # co-parent pairs separate with the empty set
        assert L_mb(g, 3, 3) == 0

    def test_L_gamma_on_cluster_mag(self):
        g = two_cluster_mag()
        val = L_gamma(g, 4, 4)
        assert val == L_gamma(g, 4, val)
        with pytest.raises(CapExceeded):
            L_gamma(g, 4, val - 1)

    def test_node_limit(self):
        from lfci.mixed_graph import complete_undirected

        with pytest.raises(GraphTooLarge):
            L_gamma(complete_undirected(21), 2, 2)


class TestBlanketsAndMoralGraph:
    def test_markov_blanket_dag(self):
        g = two_sink_hub_dag()
        assert markov_blanket(g, 0) == {1, 3, 4}
        assert markov_blanket(g, 1) == {0, 2, 3, 4, 5}

    def test_markov_blanket_bidirected_chain(self):
        g = bidirected_chain_with_child()
        # collider paths run along the whole chain; the common child 6 is
        # never an interior collider seen from 0, so it stays outside
        assert markov_blanket(g, 0, gamma=1) == {1}
        assert markov_blanket(g, 0, gamma=2) == {1, 2}
        assert markov_blanket(g, 0) == {1, 2, 3, 4, 5}
        assert markov_blanket(g, 6) == {0, 1, 2, 3, 4, 5}

    def test_gamma_truncation_is_monotone(self):
        g = two_cluster_mag()
        for v in range(g.p):
            prev = set()
            for gamma in (1, 2, 3, g.p):
                cur = markov_blanket(g, v, gamma)
                assert prev <= cur
                prev = cur

    def test_moral_graph_contains_skeleton_and_coparents(self):
        g = two_sink_hub_dag()
        m = moral_graph(g)
        for e in g.edges():
            assert m.adjacent(e.a, e.b)
        for a, b in ((1, 2), (1, 4), (1, 5), (2, 4), (2, 5), (4, 5)):
            assert m.adjacent(a, b)
        assert not m.adjacent(0, 6)

    def test_d_sep_collects_collider_connected_ancestors(self):
        g = bidirected_chain_with_child()
        assert d_sep(g, 0, 6) == {1, 2, 3, 4, 5}
        chain = from_directed_edges(3, [(0, 1), (1, 2)])
        assert d_sep(chain, 0, 2) == {1}


class TestMaximality:
    def test_fixtures_are_maximal(self):
        assert is_maximal(two_cluster_mag())
        assert is_maximal(bidirected_chain_with_child())
        assert is_maximal(two_sink_hub_dag())

    def test_primitive_inducing_path_breaks_maximality(self):
        # 0 <-> 1 <-> 2 <-> 3 with 1 --> 3 and 2 --> 0: the interior nodes
        # of the chain are colliders and ancestors of the endpoints, so
        # (0, 3) is inseparable yet non-adjacent
        g = from_edges(
            4,
            [(0, 1, H, H), (1, 2, H, H), (2, 3, H, H), (1, 3, T, H), (2, 0, T, H)],
        )
        from lfci.mixed_graph import is_ancestral

        assert is_ancestral(g)
        assert not is_maximal(g)
        for s in (set(), {1}, {2}, {1, 2}):
            assert not m_separated(g, 0, 3, s)
