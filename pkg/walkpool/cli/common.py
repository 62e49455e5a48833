# walkpool/cli/common.py
"""Flags and helpers shared by the training commands"""
import argparse
from pathlib import Path
from typing import Optional

from ..core.errors import InputError
from ..core.graph import Graph
from ..models import NodeFeatures
from ..schemas import FEATURE_GROUPS, TrainConfig, load_config
from ..services import dataset_service

# flag -> TrainConfig field
OVERRIDE_FLAGS = {
    "k_hops": int,
    "max_per_hop": int,
    "tau_c": int,
    "heads": int,
    "init_dim": int,
    "lr": float,
    "weight_decay": float,
    "batch_size": int,
    "epochs": int,
    "seed": int,
    "workers": int,
}


def add_config_flags(parser: argparse.ArgumentParser, with_seed: bool = True) -> None:
    parser.add_argument("--config", type=Path, help="key=value file of TrainConfig fields")
    parser.add_argument("--init", dest="init_mode", choices=["ones", "dl", "file"], help="initial node features")
    parser.add_argument("--embeddings", type=Path, help="node embedding file (required with --init file)")
    parser.add_argument("--select", choices=["best_val", "final"], help="epoch selection rule")
    for name, kind in OVERRIDE_FLAGS.items():
        if name == "seed" and not with_seed:
            continue
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=kind)


def config_from_args(args: argparse.Namespace, **extra) -> TrainConfig:
    """Defaults <- --config file <- flags"""
    overrides = {name: getattr(args, name, None) for name in OVERRIDE_FLAGS}
    overrides["init_mode"] = getattr(args, "init_mode", None)
    overrides["select"] = getattr(args, "select", None)
    overrides.update(extra)
    return load_config(getattr(args, "config", None), **overrides)


def external_features(cfg: TrainConfig, embeddings: Optional[Path], g: Graph) -> Optional[NodeFeatures]:
    if cfg.init_mode != "file":
        if embeddings is not None:
            raise InputError("--embeddings is only used with --init file")
        return None
    if embeddings is None:
        raise InputError("--init file needs --embeddings PATH")
    return dataset_service.load_embeddings(embeddings, g)


def parse_groups(text: str) -> tuple:
    groups = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = [g for g in groups if g not in FEATURE_GROUPS]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown feature group(s) {', '.join(unknown)}; choose from {', '.join(FEATURE_GROUPS)}"
        )
    return groups


def method_name(cfg: TrainConfig) -> str:
    """wp-<init>, with the kept groups appended for ablated models"""
    base = f"wp-{cfg.init_mode}"
    if cfg.exclude:
        return f"{base}[{'+'.join(cfg.included_groups)}]"
    return base
