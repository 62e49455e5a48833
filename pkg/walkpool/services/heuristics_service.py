# walkpool/services/heuristics_service.py
"""
Walk-based link heuristics scored on the observed graph.

Every score is computed for the canonical orientation (min, max) of its pair,
which makes score(i, j) == score(j, i) exact even where floating-point
summation order would otherwise differ.
"""
import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ConvergenceError, InputError
from ..core.graph import Graph
from ..schemas import HeuristicParams, HeuristicScore

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


def _canonical(g: Graph, i: int, j: int) -> Pair:
    if i == j:
        raise InputError(f"heuristics need two distinct nodes, got ({i}, {j})")
    if not (0 <= i < g.num_nodes and 0 <= j < g.num_nodes):
        raise InputError(f"pair ({i}, {j}) out of range [0, {g.num_nodes})")
    return (i, j) if i < j else (j, i)


def common_neighbors(g: Graph, i: int, j: int) -> float:
    i, j = _canonical(g, i, j)
    shared = np.intersect1d(g.neighbors(i), g.neighbors(j), assume_unique=True)
    return float(shared.size)


def adamic_adar(g: Graph, i: int, j: int) -> float:
    """Sum of 1/ln(degree) over common neighbors (every witness has degree >= 2)"""
    i, j = _canonical(g, i, j)
    shared = np.intersect1d(g.neighbors(i), g.neighbors(j), assume_unique=True)
    if shared.size == 0:
        return 0.0
    deg = g.degrees()[shared].astype(np.float64)
    return float(np.sum(1.0 / np.log(deg)))


def _warn_if_divergent(g: Graph, beta: float) -> None:
    max_degree = int(g.degrees().max()) if g.num_nodes else 0
    if beta * max_degree >= 1:
        logger.warning(
            "katz beta=%g with max degree %d: beta * max_degree >= 1, the series may diverge",
            beta, max_degree,
        )


def _katz_walks(g: Graph, source: int, beta: float, l_max: int) -> np.ndarray:
    """sum_l beta^l A^l e_source, accumulated as x_l = beta A x_{l-1}"""
    a = g.adjacency
    x = np.zeros(g.num_nodes, dtype=np.float64)
    x[source] = 1.0
    total = np.zeros_like(x)
    for _ in range(l_max):
        x = beta * (a @ x)
        total += x
    return total


def katz(g: Graph, i: int, j: int, beta: float = 0.001, l_max: int = 32) -> float:
    i, j = _canonical(g, i, j)
    _warn_if_divergent(g, beta)
    return float(_katz_walks(g, i, beta, l_max)[j])


def _restart_walk(
    g: Graph,
    source: int,
    alpha: float,
    iters: int,
    tol: float,
) -> np.ndarray:
    """
    Stationary vector of the walk that restarts at ``source`` with probability 1 - alpha.

    Power iteration pi <- alpha P^T pi + (1 - alpha) e_source with P = D^-1 A
    (isolated rows zero). Stops once the L1 change is below tol * (1 - alpha),
    which bounds the distance to the fixed point by alpha * tol.
    """
    deg = g.degrees().astype(np.float64)
    inv_deg = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    a_t = g.adjacency.T.tocsr()
    restart = np.zeros(g.num_nodes, dtype=np.float64)
    restart[source] = 1.0 - alpha
    pi = restart / (1.0 - alpha)
    threshold = tol * (1.0 - alpha)
    for step in range(1, iters + 1):
        nxt = alpha * (a_t @ (pi * inv_deg)) + restart
        change = float(np.abs(nxt - pi).sum())
        pi = nxt
        if change < threshold:
            return pi
    raise ConvergenceError(
        f"rooted PageRank from node {source} did not converge in {iters} iterations "
        f"(last change {change:.3e}, tol {tol:g})"
    )


def rooted_pagerank(
    g: Graph,
    i: int,
    j: int,
    alpha: float = 0.85,
    iters: int = 1000,
    tol: float = 1e-8,
) -> float:
    """Symmetrized score pi_i(j) + pi_j(i)"""
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    i, j = _canonical(g, i, j)
    return float(_restart_walk(g, i, alpha, iters, tol)[j] + _restart_walk(g, j, alpha, iters, tol)[i])


# ============================================================================
# Vectorized driver
# ============================================================================

def _score_cn(g: Graph, pairs: Sequence[Pair], params: HeuristicParams) -> List[float]:
    return [common_neighbors(g, i, j) for i, j in pairs]


def _score_aa(g: Graph, pairs: Sequence[Pair], params: HeuristicParams) -> List[float]:
    return [adamic_adar(g, i, j) for i, j in pairs]


def _score_katz(g: Graph, pairs: Sequence[Pair], params: HeuristicParams) -> List[float]:
    _warn_if_divergent(g, params.beta)
    cache: Dict[int, np.ndarray] = {}
    out = []
    for i, j in pairs:
        lo, hi = _canonical(g, i, j)
        if lo not in cache:
            cache[lo] = _katz_walks(g, lo, params.beta, params.l_max)
        out.append(float(cache[lo][hi]))
    return out


def _score_pr(g: Graph, pairs: Sequence[Pair], params: HeuristicParams) -> List[float]:
    if not 0 < params.alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {params.alpha}")
    cache: Dict[int, np.ndarray] = {}

    def walk(node: int) -> np.ndarray:
        if node not in cache:
            cache[node] = _restart_walk(g, node, params.alpha, params.iters, params.tol)
        return cache[node]

    out = []
    for i, j in pairs:
        lo, hi = _canonical(g, i, j)
        out.append(float(walk(lo)[hi] + walk(hi)[lo]))
    return out


HEURISTICS: Dict[str, Callable[[Graph, Sequence[Pair], HeuristicParams], List[float]]] = {
    "cn": _score_cn,
    "aa": _score_aa,
    "katz": _score_katz,
    "pr": _score_pr,
}


def score_pairs(
    g: Graph,
    method: str,
    pairs: Iterable[Pair],
    params: Optional[HeuristicParams] = None,
) -> List[HeuristicScore]:
    """Score every pair with one heuristic; output order matches input order"""
    scorer = HEURISTICS.get(method)
    if scorer is None:
        raise InputError(f"unknown heuristic {method!r}; choose from {', '.join(HEURISTICS)}")
    params = params or HeuristicParams()
    pairs = [(int(i), int(j)) for i, j in pairs]
    values = scorer(g, pairs, params)
    return [HeuristicScore(pair=p, value=v) for p, v in zip(pairs, values)]


def score_array(
    g: Graph,
    method: str,
    pairs: np.ndarray,
    params: Optional[HeuristicParams] = None,
) -> np.ndarray:
    return np.asarray([s.value for s in score_pairs(g, method, pairs.tolist(), params)], dtype=np.float64)
