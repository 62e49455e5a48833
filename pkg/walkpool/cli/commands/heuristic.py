# walkpool/cli/commands/heuristic.py
import argparse
import time
from pathlib import Path

import numpy as np

from ...schemas import ExperimentRow, HeuristicParams, build_heuristic_params
from ...services import dataset_service, heuristics_service, metrics_service, report_service


def register(subparsers) -> None:
    parser = subparsers.add_parser("heuristic", help="score a split tier with a classical heuristic")
    parser.add_argument("--split", type=Path, required=True, help="split directory")
    parser.add_argument("--method", choices=sorted(heuristics_service.HEURISTICS), required=True)
    parser.add_argument("--tier", choices=["test", "val"], default="test")
    add_heuristic_flags(parser)
    parser.add_argument("--out", type=Path, help="append the CSV row here instead of stdout")
    parser.set_defaults(func=run)


def add_heuristic_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beta", type=float, help="Katz decay")
    parser.add_argument("--lmax", dest="l_max", type=int, help="Katz path-length cutoff")
    parser.add_argument("--alpha", type=float, help="PageRank continuation probability")
    parser.add_argument("--iters", type=int, help="PageRank iteration cap")
    parser.add_argument("--tol", type=float, help="PageRank tolerance")


def heuristic_params(args: argparse.Namespace) -> HeuristicParams:
    given = {k: getattr(args, k, None) for k in ("beta", "l_max", "alpha", "iters", "tol")}
    return build_heuristic_params(given)


def evaluate_heuristic(split, method: str, params: HeuristicParams, tier: str = "test") -> ExperimentRow:
    pos, neg = split.tier(tier)
    started = time.perf_counter()
    scores = heuristics_service.score_array(split.observed_graph, method, np.vstack([pos, neg]), params)
    result = metrics_service.evaluate(scores[:len(pos)], scores[len(pos):])
    return ExperimentRow.from_eval(split.dataset, method, split.seed, result, time.perf_counter() - started)


def run(args: argparse.Namespace) -> None:
    split = dataset_service.load_split(args.split)
    row = evaluate_heuristic(split, args.method, heuristic_params(args), args.tier)
    report_service.emit(report_service.format_rows([row]), args.out, append=True)
