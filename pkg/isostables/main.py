import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from isostables.core.config import settings
from isostables.core.middleware import configure_logging
from isostables.core.routes import register_commands

logger = logging.getLogger(__name__)

description = """
Isostables, isochrons and linearizing coordinates of ODE systems with a
hyperbolic fixed point, computed from Laplace averages along trajectories.
Numerics come from the JSON run config; flags only choose paths and workers.
"""


def build_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=Path, required=True, help="JSON run config")
    parent.add_argument("--output", type=Path, help="Output file (default: standard output)")
    parent.add_argument("--output-dir", type=Path, help="Output directory for multi-file results")
    parent.add_argument("--field", type=Path, help="Field CSV read by the contour command")
    parent.add_argument("--workers", type=int, help=f"Worker processes for grid evaluation (default {settings.WORKERS})")
    parent.add_argument("--no-timestamp", action="store_true", help="Omit created_at from output headers")
    parent.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level")

    parser = argparse.ArgumentParser(prog="isostables", description=description)
    parser.add_argument("--version", action="version", version=f"{settings.PROJECT_NAME} {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_commands(subparsers, parent)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be at least 1")
    configure_logging(args.log_level)
    return int(args.handler(args))


if __name__ == "__main__":
    sys.exit(main())
