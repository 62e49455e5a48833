from . import dataset_service, heuristics_service, metrics_service, report_service, synthetic_service
from .subgraph_service import SubgraphService, subgraph_service
from .trainer_service import TrainerService, trainer_service

__all__ = [
    "dataset_service",
    "heuristics_service",
    "metrics_service",
    "report_service",
    "synthetic_service",
    "SubgraphService",
    "subgraph_service",
    "TrainerService",
    "trainer_service",
]
