# walkpool/cli/commands/split.py
import argparse
from pathlib import Path

from ...services import dataset_service


def register(subparsers) -> None:
    parser = subparsers.add_parser("split", help="write a reproducible train/val/test split directory")
    parser.add_argument("--graph", type=Path, required=True, help="edge list, one 'u v' pair per line")
    ratio = parser.add_mutually_exclusive_group()
    ratio.add_argument("--test-ratio", type=float, default=None, help="share of edges held out for test (default 0.1)")
    ratio.add_argument("--train-ratio", type=float, default=None, help="observe this share of edges; test = 1 - T")
    parser.add_argument("--val-ratio", type=float, default=0.05)
    parser.add_argument("--val-basis", choices=["train", "all"], default="train")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dataset", help="dataset name recorded in meta.txt (default: graph file stem)")
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.set_defaults(func=run)


def resolve_test_ratio(args: argparse.Namespace) -> float:
    if args.train_ratio is not None:
        return 1.0 - args.train_ratio
    return 0.1 if args.test_ratio is None else args.test_ratio


def run(args: argparse.Namespace) -> None:
    g = dataset_service.load_edge_list(args.graph)
    split = dataset_service.split_edges(
        g,
        test_ratio=resolve_test_ratio(args),
        val_ratio=args.val_ratio,
        seed=args.seed,
        val_basis=args.val_basis,
        dataset=args.dataset or args.graph.stem,
    )
    dataset_service.save_split(split, args.out)
