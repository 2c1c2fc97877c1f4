"""Initial-data presets and equation definitions used by the experiments."""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from fracdg.app.core.fluxes import PhysicalFlux
from fracdg.app.exceptions import ConfigError

Equation = Literal["pure_fractional", "linear_transport", "linear", "burgers"]

GAUSSIAN_WIDTH = 0.1


@dataclass(frozen=True)
class Preset:
    """A vectorized initial datum with the points where it is not smooth."""

    name: str
    u0: Callable[[np.ndarray], np.ndarray]
    description: str
    breakpoints: tuple[float, ...] = field(default=())
    decays: bool = False

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.u0(np.asarray(x, dtype=float))


def _sgn_hat(x: np.ndarray) -> np.ndarray:
    return np.where(np.abs(x) > 0.25, np.sign(x), 4.0 * x)


PRESETS: dict[str, Preset] = {
    preset.name: preset
    for preset in (
        Preset("sgn", lambda x: -np.sign(x), "-sgn(x), a stationary shock for Burgers", (0.0,)),
        Preset("arctan", lambda x: -np.arctan(15.0 * x) / 90.0, "-arctan(15x)/90"),
        Preset(
            "sgn_hat",
            _sgn_hat,
            "sgn(x) outside [-1/4, 1/4], linear ramp 4x inside",
            (-0.25, 0.25),
        ),
        Preset("sin2pi", lambda x: np.sin(2.0 * np.pi * x), "sin(2 pi x)"),
        Preset(
            "hat",
            lambda x: np.maximum(0.0, 1.0 - 2.0 * np.abs(x)),
            "symmetric hat max(0, 1 - 2|x|) supported on [-1/2, 1/2]",
            (-0.5, 0.0, 0.5),
            decays=True,
        ),
        Preset(
            "gaussian",
            lambda x: np.exp(-(x**2) / (2.0 * GAUSSIAN_WIDTH**2)),
            "exp(-x^2 / (2 * 0.1^2)), smooth and rapidly decaying",
            decays=True,
        ),
    )
}


def get_preset(name: str) -> Preset:
    """
    Look up an initial-data preset.

    Raises:
        ConfigError: If the name is unknown
    """
    try:
        return PRESETS[name]
    except KeyError as e:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r} (known: {known})", field="u0") from e


def physical_flux(equation: Equation | str, advection_speed: float = 1.0) -> PhysicalFlux:
    """
    Physical flux of an equation.

    pure_fractional: f = 0; linear_transport: f = u; linear: f = c u; burgers: f = u^2/2.
    """
    match equation:
        case "pure_fractional":
            return PhysicalFlux.zero()
        case "linear_transport":
            return PhysicalFlux.linear(1.0, name="linear_transport")
        case "linear":
            return PhysicalFlux.linear(advection_speed)
        case "burgers":
            return PhysicalFlux.burgers()
    raise ConfigError(f"unknown equation {equation!r}", field="equation")
