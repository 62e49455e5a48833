from .split import EdgeSplit, TIERS
from .features import NodeFeatures
from .subgraph import EnclosingSubgraph, SubgraphVariant, FOCAL
from .params import ModelParams, TrainedModel

__all__ = [
    "EdgeSplit",
    "TIERS",
    "NodeFeatures",
    "EnclosingSubgraph",
    "SubgraphVariant",
    "FOCAL",
    "ModelParams",
    "TrainedModel",
]
