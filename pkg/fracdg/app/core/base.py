"""Shared settings access and logging utilities for the numerical core."""

import logging
from functools import lru_cache

import numpy as np

from fracdg.app.config import Settings
from fracdg.app.exceptions import NumericalError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Get the process-wide solver settings.

    Returns:
        Settings: Cached settings instance built from the environment

    Example:
        >>> get_settings().IMPLICIT_TOL
        1e-10
    """
    return Settings()


def configure_logging(level: str | None = None) -> None:
    """
    Install a single stream handler on the ``fracdg`` logger.

    Args:
        level: Log level name; defaults to ``Settings.LOG_LEVEL``
    """
    root = logging.getLogger("fracdg")
    root.setLevel((level or get_settings().LOG_LEVEL).upper())
    if not any(getattr(h, "_fracdg", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._fracdg = True  # type: ignore[attr-defined]
        root.addHandler(handler)


def ensure_finite(values: np.ndarray, time: float | None = None, what: str = "state") -> None:
    """
    Raise NumericalError on the first non-finite entry of an array.

    Args:
        values: Array to check; for 2D coefficient arrays the cell is the last axis
        time: Simulation time reported with the error
        what: Name of the checked quantity
    """
    finite = np.isfinite(values)
    if finite.all():
        return
    flat = np.argwhere(~finite)[0]
    cell = int(flat[-1])
    value = float(values[tuple(flat)])
    logger.error(f"Non-finite {what} at cell {cell}: {value}")
    raise NumericalError(f"non-finite {what}", time=time, cell=cell, value=value)
