# walkpool/services/trainer_service.py
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from ..core.autodiff import (
    AdamState,
    Tensor,
    adam_step,
    concat,
    constant,
    gcn_layer,
    mse_loss,
    no_grad,
)
from ..core.checkpoint import load_checkpoint, save_checkpoint
from ..core.config import settings
from ..core.errors import ConvergenceError, InputError, LoadError
from ..core.graph import Graph
from ..core.rng import PortableRng, derive_seed
from ..models import EdgeSplit, EnclosingSubgraph, ModelParams, NodeFeatures, TrainedModel
from ..schemas import EvalResult, TrainConfig, TrainLogRow, build_config
from . import metrics_service
from .subgraph_service import SubgraphService, subgraph_service
from .walkpool_service import classify_batch, profile_length, wp_features

logger = logging.getLogger(__name__)

# derive_seed stream tags
_INIT_STREAM = 0
_SHUFFLE_STREAM = 1

CHECKPOINT_KIND = "walkpool-model"


class TrainerService:
    """GCN node features -> walk profiles -> classifier, trained end to end with Adam on MSE"""

    def __init__(self, subgraphs: Optional[SubgraphService] = None):
        self.subgraphs = subgraphs or subgraph_service

    # ========================================================================
    # Forward pass
    # ========================================================================

    @staticmethod
    def input_dim(cfg: TrainConfig, external: Optional[NodeFeatures] = None) -> int:
        if cfg.init_mode == "file":
            if external is None:
                raise InputError("init_mode=file needs an embeddings file")
            return external.dim
        return cfg.init_dim

    @staticmethod
    def initial_features(
        sub: EnclosingSubgraph,
        cfg: TrainConfig,
        external: Optional[NodeFeatures] = None,
    ) -> np.ndarray:
        if cfg.init_mode == "ones":
            return np.ones((sub.num_nodes, cfg.init_dim), dtype=np.float64)
        if cfg.init_mode == "dl":
            return subgraph_service.distance_labels(sub, cfg.init_dim).rows
        if external is None:
            raise InputError("init_mode=file needs an embeddings file")
        return external.select(sub.node_map)

    def node_features_for(
        self,
        sub: EnclosingSubgraph,
        cfg: TrainConfig,
        params: ModelParams,
        external: Optional[NodeFeatures] = None,
    ) -> Tensor:
        """Z = [Z0 | Z1 | Z2] with Z1, Z2 two GCN layers on the subgraph without its focal edge"""
        z0 = constant(self.initial_features(sub, cfg, external))
        a_norm = sub.gcn_adjacency
        z1 = gcn_layer(a_norm, z0, params.gcn[0])
        z2 = gcn_layer(a_norm, z1, params.gcn[1])
        return concat([z0, z1, z2], axis=1)

    def profile(
        self,
        sub: EnclosingSubgraph,
        cfg: TrainConfig,
        params: ModelParams,
        external: Optional[NodeFeatures] = None,
    ) -> Tensor:
        z = self.node_features_for(sub, cfg, params, external)
        variant = self.subgraphs.make_variants(sub)
        return wp_features(variant, z, params.heads, cfg.tau_c, cfg.included_groups)

    def forward(
        self,
        subs: Sequence[EnclosingSubgraph],
        cfg: TrainConfig,
        params: ModelParams,
        external: Optional[NodeFeatures] = None,
    ) -> Tensor:
        """Probabilities for a batch of subgraphs, in input order"""
        profiles = [self.profile(sub, cfg, params, external) for sub in subs]
        return classify_batch(profiles, params.classifier)

    # ========================================================================
    # Training
    # ========================================================================

    @staticmethod
    def init_params(cfg: TrainConfig, input_dim: int) -> ModelParams:
        rng = PortableRng(derive_seed(cfg.seed, _INIT_STREAM))
        return ModelParams.initialize(
            rng,
            input_dim=input_dim,
            gcn_hidden=cfg.gcn_hidden,
            gcn_out=cfg.gcn_out,
            attention_hidden=cfg.attention_mlp_hidden,
            attention_out=cfg.attention_mlp_out,
            num_heads=cfg.heads,
            profile_length=profile_length(cfg.tau_c, cfg.heads, cfg.included_groups),
            classifier_ratios=cfg.classifier_ratios,
        )

    def _extract_tier(
        self,
        g: Graph,
        pos: np.ndarray,
        neg: np.ndarray,
        cfg: TrainConfig,
    ) -> Tuple[List[EnclosingSubgraph], np.ndarray]:
        pairs = np.vstack([pos, neg]) if len(pos) + len(neg) else np.zeros((0, 2), dtype=np.int64)
        labels = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
        subs = self.subgraphs.extract_batch(
            g,
            pairs.tolist(),
            labels=labels.astype(int).tolist(),
            k=cfg.k_hops,
            max_per_hop=cfg.max_per_hop,
            seed=cfg.seed,
            workers=cfg.workers,
        )
        return subs, labels

    def _score_subgraphs(
        self,
        subs: Sequence[EnclosingSubgraph],
        cfg: TrainConfig,
        params: ModelParams,
        external: Optional[NodeFeatures],
    ) -> np.ndarray:
        out = np.empty(len(subs), dtype=np.float64)
        with no_grad():
            for start in range(0, len(subs), cfg.batch_size):
                chunk = subs[start:start + cfg.batch_size]
                out[start:start + len(chunk)] = self.forward(chunk, cfg, params, external).values
        return out

    def train(
        self,
        split: EdgeSplit,
        cfg: TrainConfig,
        external: Optional[NodeFeatures] = None,
    ) -> TrainedModel:
        """
        Minibatch Adam on mean squared error against 0/1 labels.

        Subgraphs come from the observed graph and are extracted once.
        Minibatch order is reshuffled every epoch from (seed, epoch). After
        each epoch the validation AUC is recorded; ``select=best_val``
        restores the parameters of the best epoch (earliest on ties), where
        the untrained parameters count as epoch 0.
        """
        for tier in ("train", "val"):
            pos, neg = split.tier(tier)
            if len(pos) == 0 or len(neg) == 0:
                raise InputError(f"split tier {tier!r} is empty; cannot train")

        input_dim = self.input_dim(cfg, external)
        params = self.init_params(cfg, input_dim)
        named = params.named()
        g = split.observed_graph

        train_subs, train_labels = self._extract_tier(g, split.train_pos, split.train_neg, cfg)
        val_subs, val_labels = self._extract_tier(g, split.val_pos, split.val_neg, cfg)
        logger.info(
            "training on %d subgraphs (%d validation), %d parameters",
            len(train_subs), len(val_subs), sum(t.values.size for t in named.values()),
        )

        state = AdamState()
        history: List[TrainLogRow] = []
        # epoch 0: untrained parameters are the first selection candidate
        scores = self._score_subgraphs(val_subs, cfg, params, external)
        initial_auc = metrics_service.auc(scores[val_labels == 1], scores[val_labels == 0])
        logger.info("epoch 0: val_auc=%.4f", initial_auc)
        best_epoch, best_auc, best_arrays = 0, initial_auc, params.to_arrays()
        epochs = tqdm(
            range(1, cfg.epochs + 1),
            desc="epochs",
            file=sys.stderr,
            disable=not settings.SHOW_PROGRESS,
        )
        for epoch in epochs:
            order = PortableRng(derive_seed(cfg.seed, _SHUFFLE_STREAM, epoch)).permutation(len(train_subs))
            total_loss = 0.0
            for start in range(0, len(order), cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                params.zero_grad()
                preds = self.forward([train_subs[k] for k in idx], cfg, params, external)
                loss = mse_loss(preds, train_labels[idx])
                loss.backward()
                adam_step(
                    named, None, state,
                    lr=cfg.lr,
                    betas=(cfg.adam_beta1, cfg.adam_beta2),
                    eps=cfg.adam_eps,
                    weight_decay=cfg.weight_decay,
                )
                total_loss += loss.item() * len(idx)
                logger.debug("epoch %d batch %d loss %.6f", epoch, start // cfg.batch_size, loss.item())

            if not params.all_finite():
                raise ConvergenceError(f"non-finite parameters after epoch {epoch}; lower the learning rate")
            scores = self._score_subgraphs(val_subs, cfg, params, external)
            val_auc = metrics_service.auc(scores[val_labels == 1], scores[val_labels == 0])
            row = TrainLogRow(epoch=epoch, train_loss=total_loss / len(order), val_auc=val_auc)
            history.append(row)
            logger.info("epoch %d: train_loss=%.6f val_auc=%.4f", epoch, row.train_loss, val_auc)
            if val_auc > best_auc:
                best_epoch, best_auc, best_arrays = epoch, val_auc, params.to_arrays()

        if cfg.select == "best_val":
            params.load_arrays(best_arrays)
            selected_epoch, selected_auc = best_epoch, best_auc
        else:
            selected_epoch, selected_auc = history[-1].epoch, history[-1].val_auc
        logger.info("selected epoch %d (val_auc=%.4f, select=%s)", selected_epoch, selected_auc, cfg.select)

        params.zero_grad()
        return TrainedModel(
            params=params,
            config=cfg,
            input_dim=input_dim,
            best_epoch=selected_epoch,
            selection_metric=float(selected_auc),
            history=history,
            initial_val_auc=float(initial_auc),
        )

    # ========================================================================
    # Inference
    # ========================================================================

    def predict(
        self,
        model: TrainedModel,
        g: Graph,
        pairs: Union[np.ndarray, Sequence[Tuple[int, int]]],
        external: Optional[NodeFeatures] = None,
    ) -> np.ndarray:
        """Probabilities for internal-id pairs; each pair is scored as (min, max)"""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= g.num_nodes):
            raise InputError(f"pair outside node range [0, {g.num_nodes})")
        canonical = np.sort(pairs, axis=1)
        cfg = model.config
        subs = self.subgraphs.extract_batch(
            g, canonical.tolist(), k=cfg.k_hops, max_per_hop=cfg.max_per_hop,
            seed=cfg.seed, workers=cfg.workers,
        )
        return self._score_subgraphs(subs, cfg, model.params, external)

    def predict_original(
        self,
        model: TrainedModel,
        g: Graph,
        pairs,
        external: Optional[NodeFeatures] = None,
    ) -> np.ndarray:
        """``predict`` for pairs given in original node ids"""
        return self.predict(model, g, g.to_internal_pairs(pairs), external)

    def evaluate(
        self,
        model: TrainedModel,
        split: EdgeSplit,
        tier: str = "test",
        external: Optional[NodeFeatures] = None,
    ) -> EvalResult:
        pos, neg = split.tier(tier)
        if len(pos) == 0 or len(neg) == 0:
            raise InputError(f"split tier {tier!r} is empty; nothing to evaluate")
        scores = self.predict(model, split.observed_graph, np.vstack([pos, neg]), external)
        return metrics_service.evaluate(scores[:len(pos)], scores[len(pos):])

    # ========================================================================
    # Checkpoints
    # ========================================================================

    @staticmethod
    def save_model(model: TrainedModel, path: Union[str, Path]) -> Path:
        metadata = {
            "kind": CHECKPOINT_KIND,
            "config": model.config.model_dump(mode="json"),
            "input_dim": model.input_dim,
            "best_epoch": model.best_epoch,
            "selection_metric": model.selection_metric,
            "initial_val_auc": model.initial_val_auc,
        }
        path = save_checkpoint(path, model.params.to_arrays(), metadata)
        logger.info("checkpoint saved to %s (epoch %d)", path, model.best_epoch)
        return path

    def load_model(self, path: Union[str, Path]) -> TrainedModel:
        arrays, metadata = load_checkpoint(path)
        if metadata.get("kind") != CHECKPOINT_KIND:
            raise LoadError(f"{path} is not a walkpool model checkpoint")
        cfg = build_config(metadata["config"], source=str(path))
        params = self.init_params(cfg, int(metadata["input_dim"]))
        params.load_arrays(arrays)
        return TrainedModel(
            params=params,
            config=cfg,
            input_dim=int(metadata["input_dim"]),
            best_epoch=int(metadata["best_epoch"]),
            selection_metric=float(metadata["selection_metric"]),
            initial_val_auc=metadata.get("initial_val_auc"),
        )


trainer_service = TrainerService()
