"""Service turning a RunConfig into operators, a flux and a finished run."""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fracdg.app.config import Settings
from fracdg.app.core.base import get_settings
from fracdg.app.core.fluxes import FluxSpec, make_flux
from fracdg.app.core.mesh import GridSpec
from fracdg.app.core.schemes import SchemeConfig, Trajectory, make_scheme, run
from fracdg.app.experiments.presets import Preset, get_preset, physical_flux
from fracdg.app.experiments.schemas import RunConfig

logger = logging.getLogger(__name__)

SUP_SAMPLES = 20_001


@dataclass
class RunResult:
    """A finished simulation together with what produced it."""

    config: RunConfig
    grid: GridSpec
    scheme: SchemeConfig
    trajectory: Trajectory


class RunService:
    """
    Service building schemes from run configurations and executing them.

    The invariant box of the flux is taken from the preset itself, so every
    grid of a convergence study uses the same numerical flux.
    """

    def __init__(self, settings: Settings | None = None) -> None:
        """
        Initialize the run service.

        Args:
            settings: Solver settings; defaults to the cached process settings
        """
        self.settings = settings or get_settings()

    @staticmethod
    def data_sup(preset: Preset, x_left: float, x_right: float) -> float:
        """sup |u0| over the window, sampled densely and at the breakpoints."""
        x = np.concatenate([np.linspace(x_left, x_right, SUP_SAMPLES), preset.breakpoints])
        return float(np.max(np.abs(preset(x))))

    def build_flux(self, config: RunConfig) -> FluxSpec:
        preset = get_preset(config.u0)
        u_inf = self.data_sup(preset, config.x_left, config.x_right)
        physical = physical_flux(config.equation, config.advection_speed)
        return make_flux(config.flux, physical, u_inf, lf_speed=config.lf_speed)

    def build_scheme(self, config: RunConfig, grid: GridSpec | None = None) -> SchemeConfig:
        """
        Assemble the scheme configuration for ``grid`` (default: the config's own grid).
        """
        grid = grid or config.grid
        return make_scheme(
            config.scheme,
            grid,
            self.build_flux(config),
            config.lam,
            config.t_end,
            k=config.k,
            cfl_safety=config.cfl_safety,
            limiter_M=config.limiter_M,
            boundary=config.boundary,
        )

    def run(self, config: RunConfig) -> RunResult:
        """
        Execute a single simulation.

        Returns:
            RunResult with snapshots at t = 0, the requested times and t_end

        Raises:
            ConfigError: If the configuration cannot be turned into a scheme
            NumericalError: If the march produces non-finite values
        """
        grid = config.grid
        scheme = self.build_scheme(config, grid)
        preset = get_preset(config.u0)
        logger.info(
            f"Running {config.scheme.value} k={config.k} on {config.equation} "
            f"(lambda={config.lam}, n={grid.n_cells}, u0={config.u0})"
        )
        trajectory = run(
            scheme,
            preset,
            grid,
            breakpoints=preset.breakpoints,
            snapshot_times=config.snapshot_times,
        )
        return RunResult(config=config, grid=grid, scheme=scheme, trajectory=trajectory)

    def output_dir(self, config: RunConfig) -> Path:
        """Snapshot directory: the config's own, else Settings.OUTPUT_DIR."""
        return Path(config.output_dir or self.settings.OUTPUT_DIR)

    def with_cells(self, config: RunConfig, n_cells: int) -> RunConfig:
        """Copy of ``config`` on a grid with ``n_cells`` cells and no snapshots."""
        return config.model_copy(update={"n_cells": n_cells, "snapshot_times": []})
