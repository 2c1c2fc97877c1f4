"""``fracdg validate``: reduced property suite."""

import argparse

from fracdg.app.services.validation_service import ValidationService

EXIT_FAILED = 3


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("validate", help="Run the property smoke suite")
    parser.add_argument("--lambda", dest="lam", type=float, default=0.5)
    parser.add_argument("--n-cells", dest="n_cells", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    results = ValidationService(lam=args.lam, n_cells=args.n_cells, seed=args.seed).run_all()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"[{status}] {result.name}: {result.detail}")
    return 0 if all(r.passed for r in results) else EXIT_FAILED
