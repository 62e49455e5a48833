# walkpool/cli/commands/sweep.py
import argparse
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List

from ...core.config import settings
from ...core.errors import InputError
from ...schemas import ExperimentRow, HeuristicParams, build_config
from ...services import dataset_service, heuristics_service, report_service
from ..common import add_config_flags, config_from_args, external_features
from .heuristic import add_heuristic_flags, evaluate_heuristic, heuristic_params
from .train import train_and_evaluate

logger = logging.getLogger(__name__)

WALKPOOL_METHOD = "wp"


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="split N times and run every method on every split")
    parser.add_argument("--graph", type=Path, required=True)
    parser.add_argument("--seeds", type=int, default=10, help="number of random splits")
    parser.add_argument("--seed-start", type=int, default=0)
    parser.add_argument(
        "--methods", default="aa,katz,pr,wp",
        help=f"comma list from {', '.join(sorted(heuristics_service.HEURISTICS))}, {WALKPOOL_METHOD}",
    )
    parser.add_argument("--test-ratio", type=float, default=0.1)
    parser.add_argument("--val-ratio", type=float, default=0.05)
    parser.add_argument("--dataset", help="dataset name in the report (default: graph file stem)")
    add_config_flags(parser, with_seed=False)
    add_heuristic_flags(parser)
    parser.add_argument("--out", type=Path, help="write the report here instead of stdout")
    parser.add_argument("--out-dir", type=Path, help="keep split directories and checkpoints here")
    parser.set_defaults(func=run)


def parse_methods(text: str) -> List[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    known = set(heuristics_service.HEURISTICS) | {WALKPOOL_METHOD}
    unknown = [m for m in methods if m not in known]
    if unknown or not methods:
        raise InputError(f"unknown method(s) {', '.join(unknown) or '<none>'}; choose from {', '.join(sorted(known))}")
    return methods


def run_seed(job: Dict[str, Any]) -> List[Dict[str, Any]]:
    """One split and every method on it; module-level so process pools can pickle it"""
    g = dataset_service.load_edge_list(job["graph"])
    split = dataset_service.split_edges(
        g,
        test_ratio=job["test_ratio"],
        val_ratio=job["val_ratio"],
        seed=job["seed"],
        dataset=job["dataset"],
    )
    out_dir = Path(job["out_dir"]) if job["out_dir"] else None
    if out_dir is not None:
        dataset_service.save_split(split, out_dir / f"{job['dataset']}_seed{job['seed']}")

    rows = []
    for method in job["methods"]:
        if method == WALKPOOL_METHOD:
            cfg = build_config({**job["config"], "seed": job["seed"]})
            embeddings = Path(job["embeddings"]) if job["embeddings"] else None
            external = external_features(cfg, embeddings, split.observed_graph)
            ckpt = out_dir / f"{job['dataset']}_seed{job['seed']}_{cfg.init_mode}.ckpt" if out_dir else None
            row = train_and_evaluate(split, cfg, external, ckpt)
        else:
            row = evaluate_heuristic(split, method, HeuristicParams(**job["heuristic_params"]))
        logger.info("seed %d %s: auc=%.4f ap=%.4f", job["seed"], row.method, row.auc, row.ap)
        rows.append(row.model_dump())
    return rows


def run(args: argparse.Namespace) -> None:
    if args.seeds < 1:
        raise InputError("--seeds must be >= 1")
    methods = parse_methods(args.methods)
    cfg = config_from_args(args)
    params = heuristic_params(args)
    workers = args.workers or settings.WORKERS
    base_job = {
        "graph": str(args.graph),
        "dataset": args.dataset or args.graph.stem,
        "test_ratio": args.test_ratio,
        "val_ratio": args.val_ratio,
        "methods": methods,
        "heuristic_params": params.model_dump(),
        # splits run in parallel, so each training stays single-worker
        "config": {**cfg.model_dump(mode="json"), "workers": 1},
        "embeddings": str(args.embeddings) if args.embeddings else None,
        "out_dir": str(args.out_dir) if args.out_dir else None,
    }
    jobs = [{**base_job, "seed": args.seed_start + s} for s in range(args.seeds)]

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_seed = list(pool.map(run_seed, jobs))
    else:
        per_seed = [run_seed(job) for job in jobs]

    rows = [ExperimentRow(**r) for seed_rows in per_seed for r in seed_rows]
    report = report_service.build_report(rows)
    report_service.emit(report_service.format_report(report), args.out)
