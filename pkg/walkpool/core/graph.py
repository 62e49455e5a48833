# walkpool/core/graph.py
"""
Immutable undirected simple graphs in compressed sparse row form, plus the
walk primitives (BFS, walk counts, transition matrices, clustering) every
other module builds on.

Dense matrices are plain ``float64`` (or ``int64`` for walk counts) numpy
arrays and are only ever materialized for subgraph-sized graphs.
"""
import logging
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as ssp

from .errors import InputError, ShapeError

logger = logging.getLogger(__name__)

UNREACHABLE = -1

Pair = Tuple[int, int]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Graph:
    """
    Undirected simple graph with sorted, deduplicated CSR neighbor lists.

    Construct through ``build_graph`` (validating) or the ``with_edge`` /
    ``without_edge`` / ``induced`` helpers; the raw constructor trusts its
    arguments.
    """

    __slots__ = ("num_nodes", "indptr", "indices", "edge_count", "original_ids", "_csr", "_lookup", "_mask")

    def __init__(
        self,
        num_nodes: int,
        indptr: np.ndarray,
        indices: np.ndarray,
        original_ids: Optional[np.ndarray] = None,
    ):
        self.num_nodes = int(num_nodes)
        self.indptr = _frozen(np.array(indptr, dtype=np.int64))
        self.indices = _frozen(np.array(indices, dtype=np.int64))
        self.edge_count = int(self.indices.size // 2)
        if original_ids is None:
            original_ids = np.arange(self.num_nodes, dtype=np.int64)
        self.original_ids = _frozen(np.array(original_ids, dtype=np.int64))
        self._csr = None
        self._lookup = None
        self._mask = None

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------
    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        pos = np.searchsorted(nbrs, v)
        return bool(pos < nbrs.size and nbrs[pos] == v)

    def edges(self) -> np.ndarray:
        """(edge_count, 2) array of pairs u < v in lexicographic order"""
        rows = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees())
        keep = rows < self.indices
        return np.stack([rows[keep], self.indices[keep]], axis=1)

    @property
    def adjacency(self) -> ssp.csr_matrix:
        if self._csr is None:
            data = np.ones(self.indices.size, dtype=np.float64)
            self._csr = ssp.csr_matrix(
                (data, self.indices, self.indptr), shape=(self.num_nodes, self.num_nodes)
            )
        return self._csr

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.num_nodes, self.num_nodes), dtype=np.float64)
        rows = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees())
        dense[rows, self.indices] = 1.0
        return dense

    def neighbor_mask(self) -> np.ndarray:
        """Read-only boolean adjacency, built once per graph"""
        if self._mask is None:
            self._mask = _frozen(self.to_dense() > 0)
        return self._mask

    # ------------------------------------------------------------------
    # Derived graphs
    # ------------------------------------------------------------------
    def with_edge(self, u: int, v: int) -> "Graph":
        if self.has_edge(u, v):
            return self
        return build_graph(self.num_nodes, np.vstack([self.edges(), [[u, v]]]), self.original_ids)

    def without_edge(self, u: int, v: int) -> "Graph":
        if not self.has_edge(u, v):
            return self
        lo, hi = min(u, v), max(u, v)
        pairs = self.edges()
        keep = ~((pairs[:, 0] == lo) & (pairs[:, 1] == hi))
        return build_graph(self.num_nodes, pairs[keep], self.original_ids)

    def induced(self, nodes: Sequence[int]) -> "Graph":
        """Subgraph on ``nodes``; local id i is ``nodes[i]``"""
        nodes = np.asarray(nodes, dtype=np.int64)
        sub = self.adjacency[nodes][:, nodes].tocsr()
        sub.sort_indices()
        return Graph(len(nodes), sub.indptr, sub.indices, self.original_ids[nodes])

    # ------------------------------------------------------------------
    # Id mapping
    # ------------------------------------------------------------------
    def to_internal(self, original_id: int) -> int:
        if self._lookup is None:
            self._lookup = {int(o): i for i, o in enumerate(self.original_ids)}
        try:
            return self._lookup[int(original_id)]
        except KeyError:
            raise InputError(f"unknown node id {original_id}") from None

    def to_internal_pairs(self, pairs: Iterable[Pair]) -> np.ndarray:
        out = [(self.to_internal(u), self.to_internal(v)) for u, v in pairs]
        return np.asarray(out, dtype=np.int64).reshape(-1, 2)

    def to_original_pairs(self, pairs: np.ndarray) -> np.ndarray:
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return self.original_ids[pairs]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"<Graph nodes={self.num_nodes} edges={self.edge_count}>"


# ============================================================================
# Construction
# ============================================================================

def build_graph(
    num_nodes: int,
    edges,
    original_ids: Optional[Sequence[int]] = None,
) -> Graph:
    """Validated constructor; duplicate pairs and orientations are merged"""
    num_nodes = int(num_nodes)
    if num_nodes < 0:
        raise InputError(f"num_nodes must be non-negative, got {num_nodes}")

    pairs = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if pairs.size:
        bad = (pairs < 0) | (pairs >= num_nodes)
        if bad.any():
            row = int(np.argmax(bad.any(axis=1)))
            raise InputError(
                f"node id out of range [0, {num_nodes}): {tuple(int(x) for x in pairs[row])}"
            )
        loops = pairs[:, 0] == pairs[:, 1]
        if loops.any():
            node = int(pairs[np.argmax(loops), 0])
            raise InputError(f"self-loop on node {node}")

    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    codes = np.unique(lo * max(num_nodes, 1) + hi)
    lo, hi = np.divmod(codes, max(num_nodes, 1))

    rows = np.concatenate([lo, hi])
    cols = np.concatenate([hi, lo])
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=num_nodes), out=indptr[1:])

    if original_ids is not None and len(original_ids) != num_nodes:
        raise InputError(f"id map has {len(original_ids)} entries for {num_nodes} nodes")
    return Graph(num_nodes, indptr, cols, None if original_ids is None else np.asarray(original_ids))


# ============================================================================
# Primitives
# ============================================================================

def bfs_distances(g: Graph, sources: Iterable[int], max_depth: Optional[int] = None) -> np.ndarray:
    """Multi-source hop distances; unreachable nodes get ``UNREACHABLE``"""
    sources = np.unique(np.asarray(list(sources), dtype=np.int64))
    if sources.size == 0:
        raise InputError("bfs_distances needs at least one source")
    if sources[0] < 0 or sources[-1] >= g.num_nodes:
        raise InputError(f"source out of range [0, {g.num_nodes})")

    dist = np.full(g.num_nodes, UNREACHABLE, dtype=np.int64)
    dist[sources] = 0
    frontier = sources
    depth = 0
    while frontier.size and (max_depth is None or depth < max_depth):
        depth += 1
        reached = g.adjacency[frontier].indices
        reached = np.unique(reached[dist[reached] == UNREACHABLE])
        dist[reached] = depth
        frontier = reached
    return dist


def path_count_matrix(g: Graph, tau: int) -> np.ndarray:
    """Exact walk counts: entry (i, j) is the number of length-tau walks"""
    if tau < 0:
        raise InputError(f"tau must be >= 0, got {tau}")
    a = g.to_dense().astype(np.int64)
    result = np.eye(g.num_nodes, dtype=np.int64)
    for _ in range(tau):
        result = result @ a
    return result


def transition_matrix(g: Graph, edge_weights: Optional[Mapping[Pair, float]] = None) -> np.ndarray:
    """
    Row-stochastic P = D^-1 W over neighbor lists.

    ``edge_weights`` maps ordered adjacent pairs to non-negative weights;
    ``None`` means uniform. Isolated nodes get all-zero rows.
    """
    n = g.num_nodes
    p = np.zeros((n, n), dtype=np.float64)
    deg = g.degrees()
    rows = np.repeat(np.arange(n, dtype=np.int64), deg)

    if edge_weights is None:
        p[rows, g.indices] = 1.0 / deg[rows]
        return p

    weights = np.empty(g.indices.size, dtype=np.float64)
    for k, (u, v) in enumerate(zip(rows.tolist(), g.indices.tolist())):
        try:
            w = float(edge_weights[(u, v)])
        except KeyError:
            raise InputError(f"missing weight for adjacent pair ({u}, {v})") from None
        if w < 0 or not np.isfinite(w):
            raise InputError(f"weight for ({u}, {v}) must be finite and non-negative, got {w}")
        weights[k] = w

    p[rows, g.indices] = weights
    sums = p.sum(axis=1)
    zero_mass = (deg > 0) & (sums == 0)
    if zero_mass.any():
        raise InputError(f"node {int(np.argmax(zero_mass))} has neighbors but zero total weight")
    nonzero = sums > 0
    p[nonzero] /= sums[nonzero, None]
    return p


def matrix_power(m: np.ndarray, tau: int) -> np.ndarray:
    """m^tau by repeated right-multiplication"""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError("matrix_power", m.shape)
    if tau < 0:
        raise InputError(f"tau must be >= 0, got {tau}")
    if tau == 0:
        return np.eye(m.shape[0], dtype=m.dtype)
    result = m.copy()
    for _ in range(tau - 1):
        result = result @ m
    return result


def average_clustering(g: Graph) -> float:
    """Mean local clustering; nodes of degree < 2 count as 0"""
    if g.num_nodes == 0:
        return 0.0
    a = g.adjacency
    triangles = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    deg = g.degrees().astype(np.float64)
    local = np.zeros(g.num_nodes, dtype=np.float64)
    ok = deg >= 2
    local[ok] = 2.0 * triangles[ok] / (deg[ok] * (deg[ok] - 1.0))
    return float(local.mean())


def gcn_normalized_adjacency(g: Graph) -> np.ndarray:
    """Dense D^-1/2 (A + I) D^-1/2 with self-loops"""
    a_hat = g.to_dense() + np.eye(g.num_nodes)
    inv_sqrt = 1.0 / np.sqrt(a_hat.sum(axis=1))
    return a_hat * inv_sqrt[:, None] * inv_sqrt[None, :]


def graph_summary(g: Graph) -> Dict[str, float]:
    n = g.num_nodes
    return {
        "num_nodes": n,
        "num_edges": g.edge_count,
        "mean_degree": (2.0 * g.edge_count / n) if n else 0.0,
        "max_degree": int(g.degrees().max()) if n else 0,
        "avg_clustering": average_clustering(g),
    }
