# walkpool/models/params.py
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Tuple

import numpy as np

from ..core.autodiff import Affine, Tensor, glorot_uniform, init_mlp, named_parameters, parameter
from ..core.errors import CheckpointError
from ..core.rng import PortableRng
from ..schemas import TrainConfig, TrainLogRow


@dataclass(eq=False)
class ModelParams:
    """
    Every trainable tensor of the model.

    Shapes, with F0 the initial feature dim, F' = F0 + gcn_hidden + gcn_out,
    and L the walk-profile length:
        gcn.0.weight            (F0, gcn_hidden)
        gcn.1.weight            (gcn_hidden, gcn_out)
        head{h}.q.{k}.weight    F' -> attention_mlp_hidden -> attention_mlp_out
        head{h}.k.{k}.weight    same as q
        classifier.{k}.weight   L -> r1*L -> ... -> rN*L -> 1
    GCN layers carry no bias; every MLP layer does.
    """

    gcn: List[Tensor]
    heads: List[Tuple[List[Affine], List[Affine]]]
    classifier: List[Affine]

    @classmethod
    def initialize(
        cls,
        rng: PortableRng,
        input_dim: int,
        gcn_hidden: int,
        gcn_out: int,
        attention_hidden: int,
        attention_out: int,
        num_heads: int,
        profile_length: int,
        classifier_ratios: Tuple[int, ...],
    ) -> "ModelParams":
        gcn = [
            parameter(glorot_uniform(rng, input_dim, gcn_hidden), name="gcn.0.weight"),
            parameter(glorot_uniform(rng, gcn_hidden, gcn_out), name="gcn.1.weight"),
        ]
        z_dim = input_dim + gcn_hidden + gcn_out
        attention_sizes = [z_dim, attention_hidden, attention_out]
        heads = []
        for h in range(num_heads):
            q = init_mlp(rng, attention_sizes, prefix=f"head{h}.q")
            k = init_mlp(rng, attention_sizes, prefix=f"head{h}.k")
            heads.append((q, k))
        classifier_sizes = [profile_length] + [r * profile_length for r in classifier_ratios] + [1]
        classifier = init_mlp(rng, classifier_sizes, prefix="classifier", zero_last=True)
        return cls(gcn=gcn, heads=heads, classifier=classifier)

    def named(self) -> "OrderedDict[str, Tensor]":
        """Stable order: gcn, then heads, then classifier"""
        out: "OrderedDict[str, Tensor]" = OrderedDict()
        for w in self.gcn:
            out[w.name] = w
        for q, k in self.heads:
            out.update(named_parameters(q))
            out.update(named_parameters(k))
        out.update(named_parameters(self.classifier))
        return out

    def to_arrays(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, t.values.copy()) for name, t in self.named().items())

    def load_arrays(self, arrays: Mapping[str, np.ndarray]) -> None:
        """Overwrite values in place; names and shapes must match exactly"""
        named = self.named()
        missing = sorted(set(named) - set(arrays))
        unexpected = sorted(set(arrays) - set(named))
        if missing or unexpected:
            raise CheckpointError(f"parameter mismatch: missing {missing}, unexpected {unexpected}")
        for name, t in named.items():
            values = np.asarray(arrays[name], dtype=np.float64)
            if values.shape != t.shape:
                raise CheckpointError(f"{name}: checkpoint shape {values.shape} != model shape {t.shape}")
            t.values[...] = values

    def zero_grad(self) -> None:
        for t in self.named().values():
            t.zero_grad()

    def all_finite(self) -> bool:
        return all(np.isfinite(t.values).all() for t in self.named().values())


@dataclass(eq=False)
class TrainedModel:
    """Parameters plus everything needed to rebuild the forward pass"""

    params: ModelParams
    config: TrainConfig
    input_dim: int
    best_epoch: int
    selection_metric: float
    history: List[TrainLogRow] = field(default_factory=list)
    initial_val_auc: Optional[float] = None
