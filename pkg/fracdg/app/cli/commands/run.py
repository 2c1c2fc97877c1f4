"""``fracdg run``: a single simulation with snapshot output."""

import argparse
import logging

from fracdg.app.cli.commands.common import add_config_arguments, load_run_config
from fracdg.app.core.fractional import dump_stencil_csv
from fracdg.app.core.norms import norm
from fracdg.app.services.run_service import RunService
from fracdg.app.services.snapshot_service import SnapshotService

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("run", help="Run one simulation and write snapshots")
    add_config_arguments(parser)
    parser.add_argument("--dump-stencil", dest="dump_stencil", help="Write G_m weights to CSV")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    service = RunService()
    result = service.run(config)
    output_dir = service.output_dir(config)
    written = SnapshotService(output_dir).emit_snapshots(result.trajectory, config)
    if args.dump_stencil and result.scheme.stencil is not None:
        written.append(dump_stencil_csv(result.scheme.stencil, args.dump_stencil))

    final = result.trajectory.final
    print(
        f"t={result.trajectory.times[-1]:g} steps={result.trajectory.steps} "
        f"dt={result.trajectory.dt:.4e}"
    )
    print(
        f"L1={norm(final, '1'):.6e} L2={norm(final, '2'):.6e} "
        f"Linf={norm(final, 'inf'):.6e} BV={norm(final, 'bv'):.6e}"
    )
    for path in written:
        print(path)
    return 0
