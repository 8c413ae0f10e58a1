"""Command-line entry point: `pareto-forecast <command> [options]`."""

import argparse
import sys
from collections.abc import Sequence
from typing import NoReturn

import structlog
from pydantic import ValidationError

from src.cli.commands import frontier, gen_data, prefer, train
from src.cli.common import EXIT_FAILURE
from src.core.config import settings
from src.core.exceptions import ParetoForecastError
from src.core.logging import configure_logging

logger = structlog.get_logger()


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with 1; exit code 2 means unsatisfied constraints."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAILURE, f"{self.prog}: error: {message}\n")


def build_parser() -> CliParser:
    parser = CliParser(
        prog="pareto-forecast",
        description="Preference-based multi-objective optimisation for service parts demand.",
    )
    parser.add_argument("--log-level", default=settings.log_level)
    parser.add_argument("--log-json", action="store_true", default=settings.log_json)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (gen_data, frontier, prefer, train):
        command.register(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level, args.log_json)
    try:
        return int(args.handler(args))
    except argparse.ArgumentTypeError as e:
        print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
    except ValidationError as e:
        print(f"{parser.prog} {args.command}: invalid configuration:\n{e}", file=sys.stderr)
    except (ParetoForecastError, OSError) as e:
        logger.error("command failed", command=args.command, error=str(e))
        print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
    return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
