# tests/conftest.py
import itertools

import numpy as np
import pytest

from walkpool.core.graph import Graph, build_graph
from walkpool.services import synthetic_service


def cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves: int) -> Graph:
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete(n: int) -> Graph:
    return build_graph(n, list(itertools.combinations(range(n), 2)))


def brute_force_walks(g: Graph, tau: int) -> np.ndarray:
    """Count walks of length tau by enumerating every node sequence"""
    n = g.num_nodes
    counts = np.zeros((n, n), dtype=np.int64)
    for seq in itertools.product(range(n), repeat=tau + 1):
        if all(g.has_edge(seq[k], seq[k + 1]) for k in range(tau)):
            counts[seq[0], seq[-1]] += 1
    return counts


def brute_force_auc(pos, neg) -> float:
    wins = 0.0
    for p in pos:
        for q in neg:
            wins += 1.0 if p > q else 0.5 if p == q else 0.0
    return wins / (len(pos) * len(neg))


def write_lines(path, lines) -> None:
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


@pytest.fixture
def ring6() -> Graph:
    return cycle(6)


@pytest.fixture
def triangle() -> Graph:
    return complete(3)


@pytest.fixture
def random_graphs():
    """Seeded Erdos-Renyi graphs with 8..20 nodes"""
    rng = np.random.default_rng(1234)
    graphs = []
    for seed in range(20):
        n = int(rng.integers(8, 21))
        p = float(rng.uniform(0.15, 0.4))
        graphs.append(synthetic_service.erdos_renyi(n, p, seed=seed))
    return graphs


@pytest.fixture
def clique_graph() -> Graph:
    return synthetic_service.disjoint_cliques(6, 6, noise_edges=4, seed=3)


@pytest.fixture
def clique_edge_file(tmp_path, clique_graph):
    path = tmp_path / "cliques.txt"
    # shift ids so original and internal ids differ
    write_lines(path, [f"{u + 100} {v + 100}" for u, v in clique_graph.edges().tolist()])
    return path


@pytest.fixture
def many_random_graphs():
    """100 seeded Erdos-Renyi graphs with 4..20 nodes"""
    rng = np.random.default_rng(4321)
    graphs = []
    for seed in range(100):
        n = int(rng.integers(4, 21))
        p = float(rng.uniform(0.1, 0.5))
        graphs.append(synthetic_service.erdos_renyi(n, p, seed=500 + seed))
    return graphs
