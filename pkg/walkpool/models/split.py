# walkpool/models/split.py
from dataclasses import dataclass, field
from typing import Dict, Iterator, Tuple

import numpy as np

from ..core.graph import Graph

TIERS = ("train", "val", "test")


def _pairs(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.int64).reshape(-1, 2)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class EdgeSplit:
    """
    Train/val/test partition of the links of one graph, in internal ids.

    ``observed_graph`` holds the training positives only; validation and
    test positives are held out of it.
    """

    observed_graph: Graph
    train_pos: np.ndarray
    train_neg: np.ndarray
    val_pos: np.ndarray
    val_neg: np.ndarray
    test_pos: np.ndarray
    test_neg: np.ndarray
    seed: int
    test_ratio: float
    val_ratio: float
    val_basis: str = "train"
    dataset: str = "graph"
    extra: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("train_pos", "train_neg", "val_pos", "val_neg", "test_pos", "test_neg"):
            object.__setattr__(self, name, _pairs(getattr(self, name)))

    def positives(self, tier: str) -> np.ndarray:
        return getattr(self, f"{tier}_pos")

    def negatives(self, tier: str) -> np.ndarray:
        return getattr(self, f"{tier}_neg")

    def tier(self, tier: str) -> Tuple[np.ndarray, np.ndarray]:
        if tier not in TIERS:
            raise KeyError(tier)
        return self.positives(tier), self.negatives(tier)

    def iter_tiers(self) -> Iterator[Tuple[str, np.ndarray, np.ndarray]]:
        for name in TIERS:
            yield (name, *self.tier(name))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeSplit):
            return NotImplemented
        same_tiers = all(
            np.array_equal(getattr(self, f"{t}_{s}"), getattr(other, f"{t}_{s}"))
            for t in TIERS for s in ("pos", "neg")
        )
        return (
            same_tiers
            and self.observed_graph == other.observed_graph
            and np.array_equal(self.observed_graph.original_ids, other.observed_graph.original_ids)
            and self.seed == other.seed
            and self.test_ratio == other.test_ratio
            and self.val_ratio == other.val_ratio
            and self.val_basis == other.val_basis
        )

    __hash__ = None

    def __repr__(self) -> str:
        sizes = ", ".join(f"{t}={len(self.positives(t))}" for t in TIERS)
        return f"<EdgeSplit {self.dataset} seed={self.seed} {sizes}>"
