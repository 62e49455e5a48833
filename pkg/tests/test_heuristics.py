# tests/test_heuristics.py
import itertools
import logging
import math

import networkx as nx
import numpy as np
import pytest
from scipy import linalg

from walkpool.core.errors import ConvergenceError, InputError
from walkpool.core.graph import build_graph, path_count_matrix, transition_matrix
from walkpool.schemas import HeuristicParams
from walkpool.services import heuristics_service as hs

from .conftest import complete, star


def pairs_of(g, limit=30):
    return list(itertools.combinations(range(g.num_nodes), 2))[:limit]


def test_common_neighbors_and_adamic_adar_on_star():
    g = star(4)
    assert hs.common_neighbors(g, 1, 2) == 1.0
    assert hs.adamic_adar(g, 1, 2) == pytest.approx(1.0 / math.log(4))
    assert hs.common_neighbors(g, 0, 1) == 0.0
    assert hs.adamic_adar(g, 0, 1) == 0.0


def test_adamic_adar_matches_networkx(random_graphs):
    for g in random_graphs[:5]:
        h = nx.Graph(g.edges().tolist())
        h.add_nodes_from(range(g.num_nodes))
        for u, v, expected in nx.adamic_adar_index(h, pairs_of(g)):
            assert hs.adamic_adar(g, u, v) == pytest.approx(expected, abs=1e-12)


def test_katz_matches_truncated_walk_sum(random_graphs):
    beta, l_max = 0.05, 6
    for g in random_graphs[:5]:
        expected = sum(beta ** l * path_count_matrix(g, l).astype(float) for l in range(1, l_max + 1))
        for u, v in pairs_of(g):
            assert hs.katz(g, u, v, beta, l_max) == pytest.approx(expected[u, v], abs=1e-10)


def test_katz_is_monotone_in_path_cutoff(ring6):
    values = [hs.katz(ring6, 0, 3, beta=0.1, l_max=l) for l in range(1, 8)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_katz_warns_when_series_may_diverge(caplog):
    g = star(5)
    with caplog.at_level(logging.WARNING):
        hs.katz(g, 1, 2, beta=0.5, l_max=3)
    assert "may diverge" in caplog.text


def test_rooted_pagerank_matches_linear_solve(random_graphs):
    alpha = 0.85
    for g in random_graphs[:5]:
        p = transition_matrix(g)
        n = g.num_nodes
        system = np.eye(n) - alpha * p.T
        stationary = {
            s: linalg.solve(system, (1 - alpha) * np.eye(n)[s])
            for s in range(n)
        }
        for u, v in pairs_of(g, limit=15):
            expected = stationary[u][v] + stationary[v][u]
            assert hs.rooted_pagerank(g, u, v, alpha=alpha, tol=1e-12) == pytest.approx(expected, abs=1e-8)


def test_rooted_pagerank_convergence_error(ring6):
    with pytest.raises(ConvergenceError):
        hs.rooted_pagerank(ring6, 0, 3, alpha=0.99, iters=2, tol=1e-14)


@pytest.mark.parametrize("method", ["cn", "aa", "katz", "pr"])
def test_scores_are_symmetric_and_finite(random_graphs, method):
    params = HeuristicParams(beta=0.01)
    for g in random_graphs[:4]:
        forward = hs.score_pairs(g, method, pairs_of(g), params)
        backward = hs.score_pairs(g, method, [(v, u) for u, v in pairs_of(g)], params)
        assert [s.value for s in forward] == [s.value for s in backward]
        assert all(s.value >= 0 for s in forward)


def test_score_pairs_keeps_input_order(ring6):
    scores = hs.score_pairs(ring6, "cn", [(0, 2), (0, 3), (4, 2)])
    assert [s.pair for s in scores] == [(0, 2), (0, 3), (4, 2)]
    assert [s.value for s in scores] == [1.0, 0.0, 1.0]


def test_cached_katz_equals_direct(ring6):
    pairs = [(0, 2), (0, 3), (3, 0), (1, 4)]
    cached = hs.score_array(ring6, "katz", np.asarray(pairs), HeuristicParams(beta=0.1, l_max=5))
    direct = [hs.katz(ring6, u, v, 0.1, 5) for u, v in pairs]
    assert cached.tolist() == direct


def test_invalid_pairs_and_methods(ring6):
    with pytest.raises(InputError):
        hs.common_neighbors(ring6, 2, 2)
    with pytest.raises(InputError):
        hs.katz(ring6, 0, 99)
    with pytest.raises(InputError, match="unknown heuristic"):
        hs.score_pairs(ring6, "jaccard", [(0, 1)])


def test_isolated_pair_scores_zero():
    g = build_graph(4, [(0, 1)])
    assert hs.katz(g, 2, 3) == 0.0
    assert hs.rooted_pagerank(g, 2, 3) == 0.0


def test_worked_values_on_complete_graphs():
    assert hs.adamic_adar(complete(4), 0, 1) == pytest.approx(2.0 / math.log(3), abs=1e-15)
    assert hs.katz(complete(3), 0, 1, beta=0.1, l_max=3) == pytest.approx(0.113, abs=1e-15)


def test_adamic_adar_lies_between_degree_bounds(many_random_graphs):
    for g in many_random_graphs:
        max_degree = int(g.degrees().max())
        for u, v in pairs_of(g):
            cn, aa = hs.common_neighbors(g, u, v), hs.adamic_adar(g, u, v)
            if cn == 0:
                assert aa == 0.0
                continue
            assert cn / math.log(max_degree) - 1e-12 <= aa <= cn / math.log(2) + 1e-12


def test_cn_and_aa_ignore_node_labels(many_random_graphs):
    rng = np.random.default_rng(21)
    for g in many_random_graphs:
        perm = rng.permutation(g.num_nodes)
        h = build_graph(g.num_nodes, perm[g.edges()])
        for u, v in pairs_of(g):
            assert hs.common_neighbors(h, perm[u], perm[v]) == hs.common_neighbors(g, u, v)
            assert hs.adamic_adar(h, perm[u], perm[v]) == pytest.approx(hs.adamic_adar(g, u, v), abs=1e-12)
