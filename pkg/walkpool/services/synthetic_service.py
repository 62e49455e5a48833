# walkpool/services/synthetic_service.py
"""Small seeded graphs for smoke runs and property tests"""
import logging

import numpy as np

from ..core.errors import InputError
from ..core.graph import Graph, build_graph
from ..core.rng import PortableRng

logger = logging.getLogger(__name__)


def erdos_renyi(num_nodes: int, p: float, seed: int = 0) -> Graph:
    """G(n, p): each of the n(n-1)/2 pairs, in (u, v) lexicographic order, is kept with probability p"""
    if num_nodes < 0:
        raise InputError(f"num_nodes must be >= 0, got {num_nodes}")
    if not 0 <= p <= 1:
        raise InputError(f"p must lie in [0, 1], got {p}")
    rng = PortableRng(seed)
    rows, cols = np.triu_indices(num_nodes, k=1)
    keep = rng.uniform_array(rows.size) < p
    return build_graph(num_nodes, np.column_stack([rows[keep], cols[keep]]))


def disjoint_cliques(
    num_cliques: int,
    clique_size: int,
    noise_edges: int = 0,
    seed: int = 0,
) -> Graph:
    """
    ``num_cliques`` copies of K_size plus ``noise_edges`` random inter-clique edges.

    Nodes of clique c are c*size .. (c+1)*size - 1. Every intra-clique pair
    closes triangles, so common-neighbor counts rank true links first.
    """
    if num_cliques < 1 or clique_size < 2:
        raise InputError("need at least one clique of size >= 2")
    n = num_cliques * clique_size
    rows, cols = np.triu_indices(clique_size, k=1)
    blocks = [np.column_stack([rows, cols]) + c * clique_size for c in range(num_cliques)]
    edges = [np.vstack(blocks)]

    if noise_edges:
        if num_cliques < 2:
            raise InputError("noise edges need at least two cliques")
        rng = PortableRng(seed)
        noise = set()
        capacity = n * (n - 1) // 2 - len(edges[0])
        if noise_edges > capacity:
            raise InputError(f"asked for {noise_edges} noise edges, only {capacity} inter-clique pairs exist")
        while len(noise) < noise_edges:
            u, v = rng.randbelow(n), rng.randbelow(n)
            if u // clique_size == v // clique_size:
                continue
            noise.add((min(u, v), max(u, v)))
        edges.append(np.asarray(sorted(noise), dtype=np.int64))

    g = build_graph(n, np.vstack(edges))
    logger.debug("built %d cliques of size %d with %d noise edges", num_cliques, clique_size, noise_edges)
    return g
