# walkpool/services/subgraph_service.py
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import InputError
from ..core.graph import UNREACHABLE, Graph, bfs_distances
from ..core.rng import PortableRng, derive_seed
from ..models import EnclosingSubgraph, NodeFeatures, SubgraphVariant

logger = logging.getLogger(__name__)

MAX_LABEL_DISTANCE = 5


class SubgraphService:
    """Enclosing-subgraph extraction around focal links"""

    @staticmethod
    def extract_enclosing(
        g: Graph,
        focal: Tuple[int, int],
        k: int = 2,
        max_per_hop: Optional[int] = 100,
        seed: int = 0,
        label: Optional[int] = None,
    ) -> EnclosingSubgraph:
        """
        Joint BFS from both endpoints, at most ``max_per_hop`` new nodes per hop.

        The node set and the capping draw depend only on the unordered focal
        pair, so swapping the endpoints only swaps local ids 0 and 1. Local
        order is [i, j] followed by the other nodes sorted by (hop, global id).
        The induced edges exclude the focal edge itself.
        """
        i, j = int(focal[0]), int(focal[1])
        if i == j:
            raise InputError(f"focal endpoints must differ, got ({i}, {j})")
        if not (0 <= i < g.num_nodes and 0 <= j < g.num_nodes):
            raise InputError(f"focal pair ({i}, {j}) out of range [0, {g.num_nodes})")
        if k < 1:
            raise InputError(f"k must be >= 1, got {k}")

        lo, hi = min(i, j), max(i, j)
        rng = PortableRng(derive_seed(seed, lo, hi))

        visited = {i, j}
        nodes = [i, j]
        hops = [0, 0]
        frontier = np.asarray([lo, hi], dtype=np.int64)
        for hop in range(1, k + 1):
            reached = np.unique(g.adjacency[frontier].indices) if frontier.size else frontier
            fresh = [int(v) for v in reached if int(v) not in visited]
            if not fresh:
                break
            if max_per_hop and len(fresh) > max_per_hop:
                fresh = sorted(rng.sample(fresh, max_per_hop))
            visited.update(fresh)
            nodes.extend(fresh)
            hops.extend([hop] * len(fresh))
            frontier = np.asarray(fresh, dtype=np.int64)

        local = g.induced(nodes).without_edge(0, 1)
        return EnclosingSubgraph(
            local_graph=local,
            node_map=np.asarray(nodes, dtype=np.int64),
            hop_of=np.asarray(hops, dtype=np.int64),
            hops=k,
            label=label,
            focal_observed=g.has_edge(i, j),
        )

    @staticmethod
    def make_variants(sub: EnclosingSubgraph) -> SubgraphVariant:
        minus = sub.local_graph.without_edge(0, 1)
        plus = sub.plus_graph if minus is sub.local_graph else minus.with_edge(0, 1)
        return SubgraphVariant(base=sub, adjacency_plus=plus, adjacency_minus=minus)

    @staticmethod
    def distance_labels(sub: EnclosingSubgraph, dim: int) -> NodeFeatures:
        """
        One-hot distance labels on G-.

        Distances d0, d1 to the endpoints are clipped to cap = min(k + 1, 5),
        unreachable maps to cap + 1, and the bucket is
        (d0 * (cap + 2) + d1) mod dim. The endpoints are fixed to (0, 1) and
        (1, 0) whether or not the focal edge exists.
        """
        if dim < 4:
            raise InputError(f"distance label dim must be >= 4, got {dim}")
        cap = min(sub.hops + 1, MAX_LABEL_DISTANCE)
        g_minus = sub.local_graph

        def clipped(source: int) -> np.ndarray:
            d = bfs_distances(g_minus, [source])
            return np.where(d == UNREACHABLE, cap + 1, np.minimum(d, cap))

        d0, d1 = clipped(0), clipped(1)
        d0[1], d1[0] = 1, 1
        index = (d0 * (cap + 2) + d1) % dim
        rows = np.zeros((sub.num_nodes, dim), dtype=np.float64)
        rows[np.arange(sub.num_nodes), index] = 1.0
        return NodeFeatures(rows)

    def extract_batch(
        self,
        g: Graph,
        pairs: Sequence[Tuple[int, int]],
        labels: Optional[Sequence[int]] = None,
        k: int = 2,
        max_per_hop: Optional[int] = 100,
        seed: int = 0,
        workers: int = 1,
    ) -> List[EnclosingSubgraph]:
        """Position-stable batch extraction; per-link seeds make results independent of workers"""
        labels = list(labels) if labels is not None else [None] * len(pairs)

        def job(idx: int) -> EnclosingSubgraph:
            u, v = pairs[idx]
            return self.extract_enclosing(g, (int(u), int(v)), k, max_per_hop, seed, labels[idx])

        if workers <= 1:
            return [job(idx) for idx in range(len(pairs))]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, range(len(pairs))))


subgraph_service = SubgraphService()
