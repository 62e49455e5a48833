# walkpool/cli/main.py
import argparse
import importlib
import logging
from typing import List, Optional

from .. import __version__
from ..core.config import settings
from ..core.errors import InputError
from ..core.logging import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# ============================================================================
# Command modules; each exposes register(subparsers) and sets args.func
# ============================================================================
COMMAND_MODULES = {
    "walkpool.cli.commands.split": {"commands": ["split"]},
    "walkpool.cli.commands.heuristic": {"commands": ["heuristic"]},
    "walkpool.cli.commands.train": {"commands": ["train", "eval", "ablate"]},
    "walkpool.cli.commands.sweep": {"commands": ["sweep"]},
    "walkpool.cli.commands.stats": {"commands": ["stats"]},
    "walkpool.cli.commands.synth": {"commands": ["synth"]},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walkpool",
        description="Link prediction with attention-weighted random-walk profiles of enclosing subgraphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default=None,
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help=f"overrides WALKPOOL_LOG_LEVEL (currently {settings.LOG_LEVEL})",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    for module_path, entry in COMMAND_MODULES.items():
        module = importlib.import_module(module_path)
        module.register(subparsers)
        logger.debug("registered %s from %s", ", ".join(entry["commands"]), module_path)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 for --help / --version
        return int(e.code or 0)
    configure_logging(level=args.log_level)

    try:
        args.func(args)
    except InputError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.error("interrupted")
        return EXIT_FAILURE
    except Exception as e:
        if logging.getLogger().isEnabledFor(logging.DEBUG):
            logger.exception("command %s failed", args.command)
        else:
            logger.error("command %s failed: %s", args.command, e)
        return EXIT_FAILURE
    return EXIT_OK
