# walkpool/cli/commands/stats.py
import argparse
from pathlib import Path

import pandas as pd

from ...core.graph import graph_summary
from ...services import dataset_service, report_service

STATS_COLUMNS = ("dataset", "num_nodes", "num_edges", "mean_degree", "max_degree", "avg_clustering")


def register(subparsers) -> None:
    parser = subparsers.add_parser("stats", help="node/edge counts, mean degree and average clustering")
    parser.add_argument("--graph", type=Path, required=True)
    parser.add_argument("--dataset", help="name in the output row (default: graph file stem)")
    parser.add_argument("--out", type=Path, help="append the CSV row here instead of stdout")
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> None:
    g = dataset_service.load_edge_list(args.graph)
    row = {"dataset": args.dataset or args.graph.stem, **graph_summary(g)}
    frame = pd.DataFrame([row], columns=list(STATS_COLUMNS))
    report_service.emit(report_service.to_csv(frame, STATS_COLUMNS), args.out, append=True)
