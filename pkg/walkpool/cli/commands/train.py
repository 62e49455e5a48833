# walkpool/cli/commands/train.py
import argparse
import logging
import time
from pathlib import Path
from typing import List, Optional, Tuple

from ...core.errors import InputError
from ...models import EdgeSplit, NodeFeatures
from ...schemas import FEATURE_GROUPS, ExperimentRow, TrainConfig
from ...services import dataset_service, report_service, trainer_service
from ..common import add_config_flags, config_from_args, external_features, method_name, parse_groups

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    train = subparsers.add_parser("train", help="train a model on a split and write a checkpoint")
    train.add_argument("--split", type=Path, required=True)
    add_config_flags(train)
    train.add_argument("--exclude", type=parse_groups, help="comma list of feature groups to drop")
    train.add_argument("--out", type=Path, required=True, help="checkpoint path")
    train.add_argument("--log", type=Path, help="training log CSV (default: <out>.log.csv)")
    train.set_defaults(func=run_train)

    evaluate = subparsers.add_parser("eval", help="evaluate a checkpoint on a split tier")
    evaluate.add_argument("--ckpt", type=Path, required=True)
    evaluate.add_argument("--split", type=Path, required=True)
    evaluate.add_argument("--embeddings", type=Path, help="node embedding file for file-mode checkpoints")
    evaluate.add_argument("--tier", choices=["test", "val", "train"], default="test")
    evaluate.add_argument("--out", type=Path, help="append the CSV row here instead of stdout")
    evaluate.set_defaults(func=run_eval)

    ablate = subparsers.add_parser("ablate", help="train one model per feature mask and report each")
    ablate.add_argument("--split", type=Path, required=True)
    add_config_flags(ablate)
    ablate.add_argument(
        "--exclude", type=parse_groups, action="append", default=[],
        help="comma list of groups to drop; repeat for several masks",
    )
    ablate.add_argument(
        "--only", type=parse_groups, action="append", default=[],
        help="keep a single group; repeat for several masks",
    )
    ablate.add_argument("--no-full", action="store_true", help="skip the unmasked model")
    ablate.add_argument("--out", type=Path, help="append CSV rows here instead of stdout")
    ablate.add_argument("--out-dir", type=Path, help="keep one checkpoint per mask here")
    ablate.set_defaults(func=run_ablate)


def train_and_evaluate(
    split: EdgeSplit,
    cfg: TrainConfig,
    external: Optional[NodeFeatures],
    ckpt: Optional[Path] = None,
) -> ExperimentRow:
    """Train on the split, evaluate on its test tier, optionally save the checkpoint"""
    started = time.perf_counter()
    model = trainer_service.train(split, cfg, external)
    result = trainer_service.evaluate(model, split, "test", external)
    elapsed = time.perf_counter() - started
    if ckpt is not None:
        trainer_service.save_model(model, ckpt)
        report_service.write_train_log(model.history, _log_path(ckpt))
    return ExperimentRow.from_eval(split.dataset, method_name(cfg), split.seed, result, elapsed)


def _log_path(ckpt: Path) -> Path:
    return ckpt.with_name(ckpt.name + ".log.csv")


def run_train(args: argparse.Namespace) -> None:
    extra = {"exclude": args.exclude} if args.exclude else {}
    cfg = config_from_args(args, **extra)
    split = dataset_service.load_split(args.split)
    external = external_features(cfg, args.embeddings, split.observed_graph)
    model = trainer_service.train(split, cfg, external)
    trainer_service.save_model(model, args.out)
    log_path = report_service.write_train_log(model.history, args.log or _log_path(args.out))
    logger.info("training log written to %s", log_path)


def run_eval(args: argparse.Namespace) -> None:
    model = trainer_service.load_model(args.ckpt)
    split = dataset_service.load_split(args.split)
    external = external_features(model.config, args.embeddings, split.observed_graph)
    started = time.perf_counter()
    result = trainer_service.evaluate(model, split, args.tier, external)
    row = ExperimentRow.from_eval(
        split.dataset, method_name(model.config), split.seed, result, time.perf_counter() - started
    )
    report_service.emit(report_service.format_rows([row]), args.out, append=True)


def ablation_masks(args: argparse.Namespace) -> List[Tuple[str, ...]]:
    """Exclusion sets in order: full model, --exclude masks, --only masks"""
    masks: List[Tuple[str, ...]] = [] if args.no_full else [()]
    masks.extend(tuple(m) for m in args.exclude)
    for only in args.only:
        if len(only) != 1:
            raise InputError(f"--only takes a single group, got {','.join(only)}")
        masks.append(tuple(g for g in FEATURE_GROUPS if g != only[0]))
    if not masks:
        raise InputError("no ablation masks left to run")
    return masks


def run_ablate(args: argparse.Namespace) -> None:
    masks = ablation_masks(args)
    base = config_from_args(args)
    split = dataset_service.load_split(args.split)
    external = external_features(base, args.embeddings, split.observed_graph)

    rows = []
    for mask in masks:
        cfg = base.with_overrides(exclude=mask)
        ckpt = None
        if args.out_dir is not None:
            tag = "full" if not mask else "-".join(cfg.included_groups)
            ckpt = args.out_dir / f"{split.dataset}_seed{split.seed}_{tag}.ckpt"
        logger.info("ablation %s (exclude=%s)", method_name(cfg), ",".join(mask) or "-")
        rows.append(train_and_evaluate(split, cfg, external, ckpt))
    report_service.emit(report_service.format_rows(rows), args.out, append=True)
