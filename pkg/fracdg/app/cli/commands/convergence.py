"""``fracdg convergence``: error and rate table against a fine-grid reference."""

import argparse

from fracdg.app.cli.commands.common import (
    add_config_arguments,
    load_run_config,
    parse_width,
    parse_widths,
)
from fracdg.app.services.study_service import StudyService, format_table

DEFAULT_WIDTHS = "1/10,1/20,1/40,1/80,1/160,1/320"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("convergence", help="Grid convergence study")
    add_config_arguments(parser)
    parser.add_argument(
        "--dx", type=parse_widths, default=parse_widths(DEFAULT_WIDTHS), help="Comma list"
    )
    parser.add_argument("--reference-dx", dest="reference_dx", type=parse_width, default=1 / 640)
    parser.add_argument("--csv", help="Write the table to this CSV file")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    table = StudyService().convergence_study(config, args.dx, args.reference_dx)
    print(format_table(table))
    if args.csv:
        print(table.to_csv(args.csv))
    return 0
