# walkpool/models/subgraph.py
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from ..core.graph import Graph, gcn_normalized_adjacency

FOCAL = (0, 1)


@dataclass(frozen=True, eq=False)
class EnclosingSubgraph:
    """
    k-hop neighborhood of a focal link, focal endpoints at local ids 0 and 1.

    ``local_graph`` is the induced subgraph with the focal edge removed (the
    G- base); ``focal_observed`` records whether the edge was present in the
    graph the subgraph was sampled from.
    """

    local_graph: Graph
    node_map: np.ndarray
    hop_of: np.ndarray
    hops: int
    label: Optional[int] = None
    focal_observed: bool = False

    focal = FOCAL

    @property
    def num_nodes(self) -> int:
        return self.local_graph.num_nodes

    @property
    def global_pair(self):
        return int(self.node_map[0]), int(self.node_map[1])

    # derived once per subgraph; every epoch reuses them
    @cached_property
    def plus_graph(self) -> Graph:
        return self.local_graph.with_edge(0, 1)

    @cached_property
    def gcn_adjacency(self) -> np.ndarray:
        return gcn_normalized_adjacency(self.local_graph)


@dataclass(frozen=True, eq=False)
class SubgraphVariant:
    base: EnclosingSubgraph
    adjacency_plus: Graph
    adjacency_minus: Graph
