# walkpool/schemas/results.py
import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

CSV_COLUMNS = ("dataset", "method", "seed", "auc", "ap", "prec_at_half", "wall_time_s")
AGGREGATE_COLUMNS = (
    "dataset", "method", "n_seeds",
    "auc_mean", "auc_std", "ap_mean", "ap_std", "prec_at_half_mean", "prec_at_half_std",
)
TRAIN_LOG_COLUMNS = ("epoch", "train_loss", "val_auc")


class HeuristicScore(BaseModel):
    pair: Tuple[int, int]
    value: float

    model_config = ConfigDict(frozen=True)

    @field_validator("value")
    @classmethod
    def finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("heuristic score must be finite")
        return v


class EvalResult(BaseModel):
    auc: float = Field(..., ge=0, le=1)
    ap: float = Field(..., ge=0, le=1)
    precision_at_half: float = Field(..., ge=0, le=1)
    n_pos: int
    n_neg: int

    model_config = ConfigDict(frozen=True)

    @property
    def counts(self) -> Tuple[int, int]:
        return self.n_pos, self.n_neg


class ExperimentRow(BaseModel):
    dataset: str
    method: str
    seed: int
    auc: float
    ap: float
    prec_at_half: float
    wall_time_s: float

    @classmethod
    def from_eval(cls, dataset: str, method: str, seed: int, result: EvalResult, wall_time: float):
        return cls(
            dataset=dataset,
            method=method,
            seed=seed,
            auc=result.auc,
            ap=result.ap,
            prec_at_half=result.precision_at_half,
            wall_time_s=wall_time,
        )


class AggregateRow(BaseModel):
    dataset: str
    method: str
    n_seeds: int
    auc_mean: float
    auc_std: Optional[float] = None
    ap_mean: float
    ap_std: Optional[float] = None
    prec_at_half_mean: float
    prec_at_half_std: Optional[float] = None


class ExperimentReport(BaseModel):
    rows: List[ExperimentRow] = Field(default_factory=list)
    aggregates: List[AggregateRow] = Field(default_factory=list)


class TrainLogRow(BaseModel):
    epoch: int
    train_loss: float
    val_auc: float
