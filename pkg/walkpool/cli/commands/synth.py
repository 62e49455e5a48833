# walkpool/cli/commands/synth.py
import argparse
from pathlib import Path

from ...services import dataset_service, synthetic_service


def register(subparsers) -> None:
    parser = subparsers.add_parser("synth", help="write a seeded synthetic edge list")
    parser.add_argument("--kind", choices=["er", "cliques"], required=True)
    parser.add_argument("--nodes", type=int, default=30, help="er: number of nodes")
    parser.add_argument("--p", type=float, default=0.2, help="er: edge probability")
    parser.add_argument("--cliques", type=int, default=6, help="cliques: number of cliques")
    parser.add_argument("--size", type=int, default=6, help="cliques: nodes per clique")
    parser.add_argument("--noise", type=int, default=0, help="cliques: random inter-clique edges")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, required=True)
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> None:
    if args.kind == "er":
        g = synthetic_service.erdos_renyi(args.nodes, args.p, args.seed)
    else:
        g = synthetic_service.disjoint_cliques(args.cliques, args.size, args.noise, args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    dataset_service.write_edge_list(args.out, g.edges())
