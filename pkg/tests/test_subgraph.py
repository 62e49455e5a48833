# tests/test_subgraph.py
import numpy as np
import pytest

from walkpool.core.errors import InputError
from walkpool.core.graph import bfs_distances, build_graph, gcn_normalized_adjacency
from walkpool.services import subgraph_service

from .conftest import complete, star


def test_ring_one_hop(ring6):
    sub = subgraph_service.extract_enclosing(ring6, (0, 1), k=1)
    assert sorted(sub.node_map.tolist()) == [0, 1, 2, 5]
    assert sub.node_map[:2].tolist() == [0, 1]
    # 5-0 and 1-2 survive, the focal 0-1 does not
    assert sub.local_graph.edge_count == 2
    assert not sub.local_graph.has_edge(0, 1)
    assert sub.focal_observed
    assert sub.global_pair == (0, 1)


def test_ring_two_hops_covers_everything(ring6):
    sub = subgraph_service.extract_enclosing(ring6, (0, 1), k=2)
    assert sorted(sub.node_map.tolist()) == list(range(6))


def test_local_order_is_hop_then_id(ring6):
    sub = subgraph_service.extract_enclosing(ring6, (3, 0), k=2)
    assert sub.node_map.tolist() == [3, 0, 1, 2, 4, 5]
    assert sub.hop_of.tolist() == [0, 0, 1, 1, 1, 1]


def test_per_hop_cap_on_star():
    g = star(200)
    sub = subgraph_service.extract_enclosing(g, (0, 1), k=1, max_per_hop=100, seed=4)
    assert sub.num_nodes == 102
    again = subgraph_service.extract_enclosing(g, (0, 1), k=1, max_per_hop=100, seed=4)
    assert np.array_equal(sub.node_map, again.node_map)


def test_uncapped_node_set_matches_bfs(random_graphs):
    for g in random_graphs:
        for u, v in [(0, 1), (2, 5), (3, 7)]:
            sub = subgraph_service.extract_enclosing(g, (u, v), k=2, max_per_hop=0)
            dist = bfs_distances(g, [u, v])
            expected = {x for x in range(g.num_nodes) if 0 <= dist[x] <= 2}
            assert set(sub.node_map.tolist()) == expected


def test_swap_only_exchanges_endpoints(random_graphs):
    for g in random_graphs:
        a = subgraph_service.extract_enclosing(g, (2, 6), k=2, max_per_hop=3, seed=1)
        b = subgraph_service.extract_enclosing(g, (6, 2), k=2, max_per_hop=3, seed=1)
        assert a.node_map[2:].tolist() == b.node_map[2:].tolist()
        assert a.node_map[:2].tolist() == b.node_map[:2][::-1].tolist()
        perm = [1, 0] + list(range(2, a.num_nodes))
        assert np.array_equal(a.local_graph.to_dense()[np.ix_(perm, perm)], b.local_graph.to_dense())


def test_induced_edges_exclude_only_the_focal_edge(triangle):
    sub = subgraph_service.extract_enclosing(triangle, (0, 1), k=1)
    variant = subgraph_service.make_variants(sub)
    assert variant.adjacency_minus.edge_count == 2
    assert variant.adjacency_plus == complete(3)


def test_variants_of_an_edgeless_pair():
    g = build_graph(2, [])
    sub = subgraph_service.extract_enclosing(g, (0, 1), k=2)
    variant = subgraph_service.make_variants(sub)
    assert sub.num_nodes == 2 and not sub.focal_observed
    assert variant.adjacency_minus.edge_count == 0
    assert variant.adjacency_plus.edge_count == 1


def test_variants_differ_in_the_focal_entry_only(random_graphs):
    for g in random_graphs:
        variant = subgraph_service.make_variants(subgraph_service.extract_enclosing(g, (0, 1), k=2))
        diff = variant.adjacency_plus.to_dense() - variant.adjacency_minus.to_dense()
        expected = np.zeros_like(diff)
        expected[0, 1] = expected[1, 0] = 1.0
        assert np.array_equal(diff, expected)


def test_distance_labels():
    # with 0-1 cut, node 4 is four hops from endpoint 1 and clips to the cap
    g = build_graph(5, [(0, 1), (0, 2), (1, 2), (0, 3), (3, 4)])
    sub = subgraph_service.extract_enclosing(g, (0, 1), k=2)
    cap = 3
    labels = subgraph_service.distance_labels(sub, dim=32).rows
    index = labels.argmax(axis=1)
    local = {int(v): i for i, v in enumerate(sub.node_map)}
    assert index[local[0]] == 0 * (cap + 2) + 1
    assert index[local[1]] == 1 * (cap + 2) + 0
    assert index[local[2]] == 1 * (cap + 2) + 1
    assert index[local[4]] == 2 * (cap + 2) + 3
    assert np.all(labels.sum(axis=1) == 1.0)


def test_distance_labels_unreachable_sentinel():
    g = build_graph(3, [(0, 1), (0, 2)])
    sub = subgraph_service.extract_enclosing(g, (0, 1), k=1)
    index = subgraph_service.distance_labels(sub, dim=32).rows.argmax(axis=1)
    cap = 2
    # node 2 reaches endpoint 0 in one hop, never endpoint 1
    assert index[2] == 1 * (cap + 2) + (cap + 1)


def test_distance_labels_need_room():
    sub = subgraph_service.extract_enclosing(build_graph(2, [(0, 1)]), (0, 1), k=1)
    with pytest.raises(InputError):
        subgraph_service.distance_labels(sub, dim=3)


def test_extraction_errors(ring6):
    with pytest.raises(InputError):
        subgraph_service.extract_enclosing(ring6, (2, 2))
    with pytest.raises(InputError):
        subgraph_service.extract_enclosing(ring6, (0, 1), k=0)


def test_batch_is_position_stable(random_graphs):
    g = random_graphs[0]
    pairs = [(0, 1), (4, 2), (3, 5), (1, 6)]
    serial = subgraph_service.extract_batch(g, pairs, k=2, max_per_hop=2, seed=5, workers=1)
    threaded = subgraph_service.extract_batch(g, pairs, k=2, max_per_hop=2, seed=5, workers=4)
    for a, b in zip(serial, threaded):
        assert np.array_equal(a.node_map, b.node_map)
        assert a.local_graph == b.local_graph


def test_variants_reuse_cached_graphs(random_graphs):
    g = random_graphs[3]
    sub = subgraph_service.extract_enclosing(g, (0, 1), k=2)
    first, second = subgraph_service.make_variants(sub), subgraph_service.make_variants(sub)
    assert first.adjacency_plus is second.adjacency_plus
    assert first.adjacency_plus.neighbor_mask() is second.adjacency_plus.neighbor_mask()
    assert np.array_equal(first.adjacency_plus.neighbor_mask(), first.adjacency_plus.to_dense() > 0)
    assert np.array_equal(sub.gcn_adjacency, gcn_normalized_adjacency(sub.local_graph))
    with pytest.raises(ValueError):
        first.adjacency_minus.neighbor_mask()[0, 0] = True
