"""Pytest fixtures and configuration."""

import logging
from collections.abc import Generator

import numpy as np
import pytest

from fracdg.app.core.base import get_settings
from fracdg.app.core.fluxes import FluxSpec, PhysicalFlux, make_flux
from fracdg.app.core.fractional import FracStencil, build_stencil, periodic_column
from fracdg.app.core.mesh import GridSpec


@pytest.fixture(autouse=True)
def fresh_settings() -> Generator[None, None, None]:
    """Drop cached settings and installed log handlers around every test."""
    get_settings.cache_clear()
    periodic_column.cache_clear()
    yield
    get_settings.cache_clear()
    periodic_column.cache_clear()
    logger = logging.getLogger("fracdg")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


@pytest.fixture(scope="function")
def rng() -> np.random.Generator:
    """Create a seeded random generator."""
    return np.random.default_rng(20240611)


@pytest.fixture(scope="function")
def grid() -> GridSpec:
    """Create a 40-cell grid on the default window [-1.5, 1.5]."""
    return GridSpec(-1.5, 1.5, 40)


@pytest.fixture(scope="function")
def stencil(grid: GridSpec) -> FracStencil:
    """Create the lambda = 1/2 stencil of the 40-cell grid."""
    return build_stencil(0.5, grid.dx, grid.n_cells - 1)


@pytest.fixture(scope="function")
def burgers_lf() -> FluxSpec:
    """Create a Lax-Friedrichs flux for Burgers on the box [-1, 1]."""
    return make_flux("lax_friedrichs", PhysicalFlux.burgers(), 1.0)


@pytest.fixture(scope="function")
def upwind() -> FluxSpec:
    """Create the upwind flux for f(u) = u."""
    return make_flux("linear_upwind", PhysicalFlux.linear(1.0), 1.0)
