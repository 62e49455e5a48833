# tests/test_metrics.py
import numpy as np
import pytest
from sklearn.metrics import average_precision_score, roc_auc_score

from walkpool.core.errors import InputError
from walkpool.services import metrics_service as ms

from .conftest import brute_force_auc


@pytest.mark.parametrize("pos, neg, expected", [
    ([0.9, 0.8], [0.7, 0.1], 1.0),
    ([0.5], [0.5], 0.5),
    ([0.6, 0.2], [0.4, 0.3], 0.5),
])
def test_auc_hand_counted(pos, neg, expected):
    assert ms.auc(pos, neg) == expected


@pytest.mark.parametrize("pos, neg, expected", [
    ([0.9], [0.1], 1.0),
    ([0.1], [0.9], 0.5),
    ([0.8, 0.4], [0.6], 5.0 / 6.0),
])
def test_average_precision_hand_ranked(pos, neg, expected):
    assert ms.average_precision(pos, neg) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("pos, neg, expected", [
    ([0.9], [0.1], 1.0),
    ([0.4], [0.6], 0.0),
    ([0.9, 0.6], [0.7, 0.2], 2.0 / 3.0),
    ([0.5], [0.5], 0.0),
])
def test_precision_at_half_counts(pos, neg, expected):
    assert ms.precision_at_half(pos, neg) == pytest.approx(expected, abs=1e-15)


def test_auc_matches_pairwise_count_and_sklearn():
    rng = np.random.default_rng(7)
    for _ in range(50):
        pos = rng.integers(0, 6, size=rng.integers(1, 15)).astype(float)
        neg = rng.integers(0, 6, size=rng.integers(1, 15)).astype(float)
        value = ms.auc(pos, neg)
        assert value == pytest.approx(brute_force_auc(pos, neg), abs=1e-12)
        y = np.r_[np.ones(pos.size), np.zeros(neg.size)]
        assert value == pytest.approx(roc_auc_score(y, np.r_[pos, neg]), abs=1e-12)


def test_auc_complement_is_exact():
    rng = np.random.default_rng(8)
    for _ in range(100):
        pos = rng.normal(size=rng.integers(1, 20)).round(1)
        neg = rng.normal(size=rng.integers(1, 20)).round(1)
        assert ms.auc(pos, neg) + ms.auc(neg, pos) == 1.0


def test_auc_is_invariant_under_monotone_transforms():
    rng = np.random.default_rng(9)
    for _ in range(100):
        pos = rng.uniform(size=rng.integers(1, 30)).round(2)
        neg = rng.uniform(size=rng.integers(1, 30)).round(2)
        base = ms.auc(pos, neg)
        assert ms.auc(np.exp(3 * pos), np.exp(3 * neg)) == base
        assert ms.auc(pos ** 3, neg ** 3) == base
        assert ms.auc(10 * pos - 4, 10 * neg - 4) == base


def test_average_precision_matches_sklearn_without_ties():
    rng = np.random.default_rng(10)
    pos, neg = rng.uniform(size=40), rng.uniform(size=35)
    y = np.r_[np.ones(pos.size), np.zeros(neg.size)]
    assert ms.average_precision(pos, neg) == pytest.approx(
        average_precision_score(y, np.r_[pos, neg]), abs=1e-12
    )


def test_average_precision_ties_rank_negatives_first():
    assert ms.average_precision([0.5], [0.5]) == 0.5
    assert ms.average_precision([0.9, 0.5], [0.5, 0.1]) < 1.0
    assert ms.average_precision([0.9, 0.6], [0.5, 0.1]) == 1.0


@pytest.mark.parametrize("pos, neg", [([], [0.1]), ([0.1], []), ([np.nan], [0.2]), ([0.1], [np.inf])])
def test_bad_inputs(pos, neg):
    with pytest.raises(InputError):
        ms.auc(pos, neg)


def test_evaluate_bundles_everything():
    result = ms.evaluate([0.9, 0.6], [0.7, 0.2])
    assert result.auc == 0.75
    assert result.precision_at_half == pytest.approx(2.0 / 3.0)
    assert result.counts == (2, 2)
