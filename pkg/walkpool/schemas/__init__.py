from .config import (
    FEATURE_GROUPS,
    HeuristicParams,
    TrainConfig,
    build_config,
    build_heuristic_params,
    load_config,
)
from .results import (
    AGGREGATE_COLUMNS,
    CSV_COLUMNS,
    TRAIN_LOG_COLUMNS,
    AggregateRow,
    EvalResult,
    ExperimentReport,
    ExperimentRow,
    HeuristicScore,
    TrainLogRow,
)

__all__ = [
    "FEATURE_GROUPS",
    "HeuristicParams",
    "TrainConfig",
    "build_config",
    "build_heuristic_params",
    "load_config",
    "AGGREGATE_COLUMNS",
    "CSV_COLUMNS",
    "TRAIN_LOG_COLUMNS",
    "AggregateRow",
    "EvalResult",
    "ExperimentReport",
    "ExperimentRow",
    "HeuristicScore",
    "TrainLogRow",
]
