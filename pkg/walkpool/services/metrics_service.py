# walkpool/services/metrics_service.py
"""
Ranking metrics for link prediction.

``average_precision`` is the ranking AP used for model comparison;
``precision_at_half`` is the thresholded TP / (TP + FP) at score 0.5. Both
are reported side by side under distinct column names.
"""
import logging
from typing import Sequence, Union

import numpy as np
from scipy.stats import rankdata

from ..core.errors import InputError
from ..schemas import EvalResult

logger = logging.getLogger(__name__)

Scores = Union[Sequence[float], np.ndarray]

THRESHOLD = 0.5


def _scores(values: Scores, side: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise InputError(f"{side} scores are empty")
    if not np.isfinite(arr).all():
        raise InputError(f"{side} scores contain non-finite values")
    return arr


def auc(pos_scores: Scores, neg_scores: Scores) -> float:
    """
    P(pos > neg) with ties at one half, via the Mann-Whitney rank sum.

    The count is computed as an exact integer of half-units and the result is
    taken from whichever side is smaller, so auc(p, n) + auc(n, p) == 1
    holds exactly in floating point.
    """
    pos = _scores(pos_scores, "positive")
    neg = _scores(neg_scores, "negative")
    n_pos, n_neg = pos.size, neg.size

    ranks = rankdata(np.concatenate([pos, neg]), method="average")
    # 2 * (rank sum - n_pos(n_pos+1)/2) is an integer count of half-wins
    twice_wins = int(round(2.0 * ranks[:n_pos].sum())) - n_pos * (n_pos + 1)
    twice_total = 2 * n_pos * n_neg
    if 2 * twice_wins <= twice_total:
        return twice_wins / twice_total
    return 1.0 - (twice_total - twice_wins) / twice_total


def average_precision(pos_scores: Scores, neg_scores: Scores) -> float:
    """Mean precision at each positive's rank; ties place negatives first"""
    pos = _scores(pos_scores, "positive")
    neg = _scores(neg_scores, "negative")
    scores = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(pos.size, dtype=np.int64), np.zeros(neg.size, dtype=np.int64)])
    # lexsort: last key is primary -> score descending, then label ascending
    order = np.lexsort((labels, -scores))
    hits = labels[order]
    cumulative = np.cumsum(hits)
    ranks = np.arange(1, hits.size + 1)
    return float(np.mean(cumulative[hits == 1] / ranks[hits == 1]))


def precision_at_half(pos_scores: Scores, neg_scores: Scores) -> float:
    pos = _scores(pos_scores, "positive")
    neg = _scores(neg_scores, "negative")
    tp = int(np.count_nonzero(pos > THRESHOLD))
    fp = int(np.count_nonzero(neg > THRESHOLD))
    if tp + fp == 0:
        return 0.0
    return tp / (tp + fp)


def evaluate(pos_scores: Scores, neg_scores: Scores) -> EvalResult:
    pos = _scores(pos_scores, "positive")
    neg = _scores(neg_scores, "negative")
    result = EvalResult(
        auc=auc(pos, neg),
        ap=average_precision(pos, neg),
        precision_at_half=precision_at_half(pos, neg),
        n_pos=int(pos.size),
        n_neg=int(neg.size),
    )
    logger.debug("evaluated %d/%d scores: auc=%.4f ap=%.4f", pos.size, neg.size, result.auc, result.ap)
    return result
