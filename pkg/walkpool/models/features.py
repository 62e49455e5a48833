# walkpool/models/features.py
from dataclasses import dataclass

import numpy as np

from ..core.errors import InputError


@dataclass(frozen=True, eq=False)
class NodeFeatures:
    """Row i holds the features of internal node i"""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise InputError(f"node features must be a matrix, got shape {rows.shape}")
        if not np.isfinite(rows).all():
            bad = int(np.argmax(~np.isfinite(rows).all(axis=1)))
            raise InputError(f"non-finite feature on node row {bad}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def num_nodes(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def select(self, nodes) -> np.ndarray:
        return self.rows[np.asarray(nodes, dtype=np.int64)]
