"""Pydantic schemas for run configuration and convergence tables."""

import csv
import json
import logging
import math
import tomllib
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fracdg.app.core.fluxes import MONOTONE_KINDS, FluxKind
from fracdg.app.core.mesh import MAX_DEGREE, GridSpec
from fracdg.app.core.schemes import SchemeKind
from fracdg.app.exceptions import ConfigError
from fracdg.app.experiments.presets import PRESETS, Equation

logger = logging.getLogger(__name__)

NORM_KEYS = ("1", "2", "inf")


class RunConfig(BaseModel):
    """
    Validated configuration of a single simulation.

    Only ``equation``, ``lambda``, ``n_cells`` and ``t_end`` are required.
    """

    equation: Equation = Field(description="pure_fractional, linear_transport, linear or burgers")
    lam: float | None = Field(
        alias="lambda",
        gt=0.0,
        lt=1.0,
        description="Order of the fractional Laplacian; null drops the nonlocal term",
    )
    n_cells: int = Field(gt=0, description="Number of cells in the window")
    t_end: float = Field(ge=0.0, description="Final time")
    advection_speed: float = Field(default=1.0, description="c in f(u) = c u for 'linear'")
    x_left: float = Field(default=-1.5, description="Left end of the window")
    x_right: float = Field(default=1.5, description="Right end of the window")
    k: int = Field(default=0, ge=0, le=MAX_DEGREE, description="Polynomial degree")
    flux: FluxKind = Field(default=FluxKind.LAX_FRIEDRICHS, description="Numerical flux")
    scheme: SchemeKind = Field(default=SchemeKind.EXPLICIT_FV, description="Time-marching scheme")
    cfl_safety: float = Field(default=0.9, gt=0.0, le=1.0, description="Fraction of the CFL bound")
    snapshot_times: list[float] = Field(default_factory=list, description="Output times")
    u0: str = Field(default="sgn_hat", description="Initial-data preset name")
    boundary: Literal["zero", "periodic"] = Field(
        default="zero", description="Exterior rule: zero extension or periodic window"
    )
    limiter_M: float = Field(default=0.0, ge=0.0, description="TVB constant; inf disables limiting")
    lf_speed: float | None = Field(
        default=None, ge=0.0, description="Lax-Friedrichs speed; default max|f'| on the data range"
    )
    output_dir: Path | None = Field(
        default=None, description="Where snapshots go; default Settings.OUTPUT_DIR"
    )

    model_config = ConfigDict(
        extra="forbid",
        populate_by_name=True,
        json_schema_extra={
            "example": {
                "equation": "burgers",
                "lambda": 0.5,
                "n_cells": 300,
                "t_end": 0.5,
                "scheme": "imex_fv",
                "u0": "sgn_hat",
                "snapshot_times": [0.1, 0.25],
            }
        },
    )

    @model_validator(mode="after")
    def _check_cross_fields(self) -> "RunConfig":
        if self.scheme in (SchemeKind.EXPLICIT_FV, SchemeKind.IMEX_FV) and self.k != 0:
            raise ValueError(f"scheme {self.scheme.value} requires k = 0, got k = {self.k}")
        if self.flux not in MONOTONE_KINDS:
            raise ValueError(f"flux {self.flux.value} is not monotone")
        if self.flux is FluxKind.LINEAR_UPWIND and self.equation == "burgers":
            raise ValueError("linear_upwind flux requires a linear equation")
        if self.u0 not in PRESETS:
            raise ValueError(f"unknown u0 preset {self.u0!r}; known: {', '.join(sorted(PRESETS))}")
        if not self.x_left < self.x_right:
            raise ValueError("x_left must be smaller than x_right")
        if any(t < 0 or t > self.t_end for t in self.snapshot_times):
            raise ValueError("snapshot_times must lie in [0, t_end]")
        return self

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.x_left, self.x_right, self.n_cells)

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict[str, Any] | None = None) -> "RunConfig":
        """
        Load a TOML or JSON configuration; non-None ``overrides`` win over file values.

        Raises:
            ConfigError: If the file cannot be read or parsed
            pydantic.ValidationError: If the merged values are invalid
        """
        data = read_config_file(path)
        return cls.from_mapping(data, overrides)

    @classmethod
    def from_mapping(
        cls, data: dict[str, Any], overrides: dict[str, Any] | None = None
    ) -> "RunConfig":
        merged = dict(data)
        merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
        return cls.model_validate(merged)


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Parse a ``.toml`` or ``.json`` file into a plain dict."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}", field="config") from e
    try:
        if path.suffix == ".json":
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot parse config file {path}: {e}", field="config") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a table/object", field="config")
    return data


class ErrorRow(BaseModel):
    """One grid of a convergence study: E, R = E/|u_ref| and the observed rate per norm."""

    dx: float = Field(gt=0.0)
    errors: dict[str, float] = Field(description="E per norm key '1', '2', 'inf'")
    relative: dict[str, float] = Field(description="R per norm key")
    rates: dict[str, float | None] = Field(description="alpha per norm key; None on the last row")


class ErrorTable(BaseModel):
    """Convergence table; rows ordered from coarse to fine."""

    label: str = Field(default="", description="Free-form description of the study")
    rows: list[ErrorRow] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _check_rates(self) -> "ErrorTable":
        if self.rows and any(v is not None for v in self.rows[-1].rates.values()):
            raise ValueError("the last row cannot carry a convergence rate")
        return self

    @classmethod
    def from_errors(
        cls,
        dxs: list[float],
        errors: dict[str, list[float]],
        reference_norms: dict[str, float],
        label: str = "",
    ) -> "ErrorTable":
        """
        Build the table from raw errors.

        alpha_m = (log E_m - log E_{m+1}) / log(dx_m / dx_{m+1}); undefined
        where either error vanishes.
        """
        rows = []
        for m, dx in enumerate(dxs):
            e = {key: float(values[m]) for key, values in errors.items()}
            r = {
                key: (e[key] / reference_norms[key] if reference_norms.get(key) else math.nan)
                for key in e
            }
            rates: dict[str, float | None] = {}
            for key in e:
                if m + 1 < len(dxs):
                    nxt = errors[key][m + 1]
                    ok = e[key] > 0 and nxt > 0
                    rates[key] = (
                        math.log(e[key] / nxt) / math.log(dx / dxs[m + 1]) if ok else None
                    )
                else:
                    rates[key] = None
            rows.append(ErrorRow(dx=dx, errors=e, relative=r, rates=rates))
        return cls(label=label, rows=rows)

    def rates(self, key: str = "1") -> list[float]:
        values = (row.rates.get(key) for row in self.rows)
        return [v for v in values if v is not None]

    def to_csv(self, path: str | Path) -> Path:
        """Write the table with 17 significant digits (exact float round-trip)."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        keys = self._keys()
        fieldnames = ["dx"] + [f"{kind}_{key}" for key in keys for kind in ("E", "R", "alpha")]
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=fieldnames)
            writer.writeheader()
            for row in self.rows:
                record = {"dx": _fmt(row.dx)}
                for key in keys:
                    record[f"E_{key}"] = _fmt(row.errors[key])
                    record[f"R_{key}"] = _fmt(row.relative[key])
                    record[f"alpha_{key}"] = _fmt(row.rates[key])
                writer.writerow(record)
        logger.info(f"Error table written: {path}")
        return path

    @classmethod
    def from_csv(cls, path: str | Path, label: str = "") -> "ErrorTable":
        with Path(path).open(newline="", encoding="utf-8") as handle:
            records = list(csv.DictReader(handle))
        header = records[0].keys() if records else []
        keys = [name[2:] for name in header if name.startswith("E_")]
        rows = [
            ErrorRow(
                dx=float(rec["dx"]),
                errors={key: float(rec[f"E_{key}"]) for key in keys},
                relative={key: float(rec[f"R_{key}"]) for key in keys},
                rates={key: _parse(rec[f"alpha_{key}"]) for key in keys},
            )
            for rec in records
        ]
        return cls(label=label, rows=rows)

    def _keys(self) -> list[str]:
        present = self.rows[0].errors.keys() if self.rows else NORM_KEYS
        return [key for key in NORM_KEYS if key in present]


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.17g}"


def _parse(text: str) -> float | None:
    return None if text == "" else float(text)
