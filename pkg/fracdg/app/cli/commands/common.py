"""Flags shared by the subcommands that build a RunConfig."""

import argparse
from fractions import Fraction
from typing import Any

from fracdg.app.core.fluxes import FluxKind
from fracdg.app.core.schemes import SchemeKind
from fracdg.app.exceptions import ConfigError
from fracdg.app.experiments.presets import PRESETS
from fracdg.app.experiments.schemas import RunConfig

# argparse dest -> RunConfig field
_FIELDS = {
    "equation": "equation",
    "lam": "lambda",
    "n_cells": "n_cells",
    "t_end": "t_end",
    "advection_speed": "advection_speed",
    "x_left": "x_left",
    "x_right": "x_right",
    "k": "k",
    "flux": "flux",
    "scheme": "scheme",
    "cfl_safety": "cfl_safety",
    "snapshot_times": "snapshot_times",
    "u0": "u0",
    "boundary": "boundary",
    "limiter_M": "limiter_M",
    "lf_speed": "lf_speed",
    "output_dir": "output_dir",
}


def parse_width(text: str) -> float:
    """Parse a cell width written as a decimal or a fraction such as ``1/640``."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a cell width: {text!r}") from e


def parse_widths(text: str) -> list[float]:
    return [parse_width(part) for part in text.split(",") if part.strip()]


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    """Register the config file option and every RunConfig override flag."""
    parser.add_argument("--config", help="TOML or JSON run configuration")
    group = parser.add_argument_group("overrides")
    group.add_argument(
        "--equation", choices=["pure_fractional", "linear_transport", "linear", "burgers"]
    )
    group.add_argument("--lambda", dest="lam", type=float, help="Fractional order in (0, 1)")
    group.add_argument("--n-cells", dest="n_cells", type=int)
    group.add_argument("--t-end", dest="t_end", type=float)
    group.add_argument("--advection-speed", dest="advection_speed", type=float)
    group.add_argument("--x-left", dest="x_left", type=float)
    group.add_argument("--x-right", dest="x_right", type=float)
    group.add_argument("--k", type=int, choices=[0, 1, 2])
    group.add_argument("--flux", choices=[kind.value for kind in FluxKind])
    group.add_argument("--scheme", choices=[kind.value for kind in SchemeKind])
    group.add_argument("--cfl-safety", dest="cfl_safety", type=float)
    group.add_argument(
        "--snapshot", dest="snapshot_times", type=float, action="append", help="Output time"
    )
    group.add_argument("--u0", choices=sorted(PRESETS))
    group.add_argument("--boundary", choices=["zero", "periodic"])
    group.add_argument("--limiter-M", dest="limiter_M", type=float)
    group.add_argument("--lf-speed", dest="lf_speed", type=float)
    group.add_argument("--output-dir", dest="output_dir")


def overrides_from(args: argparse.Namespace) -> dict[str, Any]:
    values = vars(args)
    return {field: values[dest] for dest, field in _FIELDS.items() if values.get(dest) is not None}


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the optional config file with the command-line overrides.

    Raises:
        ConfigError: If the file cannot be read
        pydantic.ValidationError: If the merged configuration is invalid
    """
    overrides = overrides_from(args)
    if args.config:
        return RunConfig.from_file(args.config, overrides)
    if not overrides:
        raise ConfigError("no configuration given: pass --config or the required flags")
    return RunConfig.from_mapping({}, overrides)
