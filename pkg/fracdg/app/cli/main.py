"""Command-line entry point: ``fracdg {run, convergence, validate}``."""

import argparse
import logging
import sys

from pydantic import ValidationError

from fracdg.app.cli.commands import convergence, run, validate
from fracdg.app.core.base import configure_logging, get_settings
from fracdg.app.exceptions import ConfigError, DomainError, NumericalError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdg",
        description="DG and monotone finite-volume solvers for fractal conservation laws",
    )
    parser.add_argument("--log-level", dest="log_level", help="Override FRACDG_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (run, convergence, validate):
        command.register(subparsers)
    return parser


def _describe(error: ValidationError) -> str:
    lines = ["invalid configuration:"]
    for item in error.errors():
        where = ".".join(str(part) for part in item["loc"]) or "config"
        lines.append(f"  {where}: {item['msg']}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    """
    Parse arguments, dispatch to a subcommand and map failures to exit codes.

    Returns:
        0 on success, 2 for configuration errors, 3 for numerical failures
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    settings = get_settings()
    configure_logging(args.log_level or ("DEBUG" if settings.DEBUG else settings.LOG_LEVEL))
    try:
        return int(args.handler(args))
    except ValidationError as e:
        print(_describe(e), file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, DomainError) as e:
        field = f" [{e.field}]" if getattr(e, "field", None) else ""
        print(f"configuration error{field}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
