"""Physical fluxes and two-point numerical fluxes for scalar conservation laws."""

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
import scipy.integrate

from fracdg.app.exceptions import ConfigError

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]

SPEED_SAMPLES = 10_001
EFLUX_TOL = 1e-12


class FluxKind(StrEnum):
    LAX_FRIEDRICHS = "lax_friedrichs"
    ENGQUIST_OSHER = "engquist_osher"
    GODUNOV = "godunov"
    LINEAR_UPWIND = "linear_upwind"
    CENTRAL = "central"


MONOTONE_KINDS = frozenset(
    {FluxKind.LAX_FRIEDRICHS, FluxKind.ENGQUIST_OSHER, FluxKind.GODUNOV, FluxKind.LINEAR_UPWIND}
)


@dataclass(frozen=True)
class PhysicalFlux:
    """
    Physical flux f with its derivative.

    ``minimizer`` marks a convex flux with a single critical point;
    ``linear_speed`` marks f(u) = c u. Fluxes with neither are handled by
    sampling and quadrature.
    """

    name: str
    f: ArrayFn
    f_prime: ArrayFn
    antiderivative: ArrayFn | None = None
    minimizer: float | None = None
    linear_speed: float | None = None

    @classmethod
    def zero(cls) -> "PhysicalFlux":
        return cls.linear(0.0, name="zero")

    @classmethod
    def linear(cls, c: float, name: str | None = None) -> "PhysicalFlux":
        return cls(
            name=name or f"linear({c:g})",
            f=lambda u: c * np.asarray(u, dtype=float),
            f_prime=lambda u: np.full_like(np.asarray(u, dtype=float), c),
            antiderivative=lambda u: 0.5 * c * np.asarray(u, dtype=float) ** 2,
            linear_speed=c,
        )

    @classmethod
    def burgers(cls) -> "PhysicalFlux":
        return cls(
            name="burgers",
            f=lambda u: 0.5 * np.asarray(u, dtype=float) ** 2,
            f_prime=lambda u: np.asarray(u, dtype=float),
            antiderivative=lambda u: np.asarray(u, dtype=float) ** 3 / 6.0,
            minimizer=0.0,
        )

    @property
    def is_linear(self) -> bool:
        return self.linear_speed is not None

    @property
    def is_convex(self) -> bool:
        return self.is_linear or self.minimizer is not None

    def integral(self, a: float, b: float) -> float:
        """int_a^b f(s) ds."""
        if self.antiderivative is not None:
            return float(self.antiderivative(np.asarray(b)) - self.antiderivative(np.asarray(a)))
        value, _ = scipy.integrate.quad(lambda s: float(self.f(np.asarray(s))), a, b, epsabs=1e-14)
        return float(value)

    def speed_bounds(self, u_inf: float) -> tuple[float, float]:
        """(max f'^+, max f'^-) over [-u_inf, u_inf]."""
        if self.is_linear:
            c = float(self.linear_speed)  # type: ignore[arg-type]
            return max(c, 0.0), max(-c, 0.0)
        slopes = self.f_prime(np.linspace(-u_inf, u_inf, SPEED_SAMPLES))
        return float(max(slopes.max(), 0.0)), float(max(-slopes.min(), 0.0))

    def max_speed(self, u_inf: float) -> float:
        """max |f'| over [-u_inf, u_inf]."""
        return max(self.speed_bounds(u_inf))


@dataclass(frozen=True)
class FluxSpec:
    """
    A numerical flux F(a, b) for a given physical flux.

    Args:
        kind: Numerical flux family
        physical: Physical flux f
        u_inf: Half-width of the invariant box [-u_inf, u_inf]
        lf_speed: Dissipation speed of the Lax-Friedrichs flux
    """

    kind: FluxKind
    physical: PhysicalFlux
    u_inf: float
    lf_speed: float = 0.0

    @property
    def is_monotone(self) -> bool:
        return self.kind in MONOTONE_KINDS

    @property
    def lipschitz(self) -> tuple[float, float]:
        return lipschitz_constants(self, self.u_inf)

    def __call__(self, a: np.ndarray | float, b: np.ndarray | float) -> np.ndarray:
        return evaluate(self, a, b)


def make_flux(
    kind: FluxKind | str,
    physical: PhysicalFlux,
    u_inf: float,
    lf_speed: float | None = None,
) -> FluxSpec:
    """
    Build a numerical flux on the invariant box of the initial datum.

    Args:
        kind: Flux family name
        physical: Physical flux
        u_inf: sup-norm of the initial datum
        lf_speed: LF dissipation speed; defaults to max |f'| on the box

    Returns:
        FluxSpec

    Example:
        >>> make_flux("lax_friedrichs", PhysicalFlux.burgers(), 1.0).lf_speed
        1.0
    """
    try:
        kind = FluxKind(kind)
    except ValueError as e:
        raise ConfigError(f"unknown flux kind {kind!r}", field="flux") from e
    if u_inf < 0:
        raise ConfigError(f"u_inf must be >= 0, got {u_inf}", field="u_inf")
    if kind is FluxKind.LINEAR_UPWIND and not physical.is_linear:
        raise ConfigError(
            f"linear_upwind needs a linear physical flux, got {physical.name}", field="flux"
        )
    speed = physical.max_speed(u_inf) if lf_speed is None else lf_speed
    if kind is FluxKind.LAX_FRIEDRICHS and speed < physical.max_speed(u_inf) - 1e-12:
        logger.warning(f"LF speed {speed} below max|f'| on the box; the flux is not monotone")
    return FluxSpec(kind=kind, physical=physical, u_inf=u_inf, lf_speed=speed)


def _godunov(phys: PhysicalFlux, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    fa, fb = phys.f(a), phys.f(b)
    if phys.is_convex:
        lower = np.minimum(fa, fb)
        if phys.minimizer is not None:
            inside = (np.minimum(a, b) <= phys.minimizer) & (phys.minimizer <= np.maximum(a, b))
            lower = np.where(inside, np.minimum(lower, phys.f(np.asarray(phys.minimizer))), lower)
        upper = np.maximum(fa, fb)
    else:
        t = np.linspace(0.0, 1.0, 129)
        path = phys.f(a[..., None] + (b - a)[..., None] * t)
        lower, upper = path.min(axis=-1), path.max(axis=-1)
    return np.where(a <= b, lower, upper)


def _split_part(phys: PhysicalFlux, u: float, sign: int) -> float:
    def slope(s: float) -> float:
        d = float(phys.f_prime(np.asarray(s)))
        return max(d, 0.0) if sign > 0 else min(d, 0.0)

    value, _ = scipy.integrate.quad(slope, 0.0, u, epsabs=1e-14, limit=200)
    return float(value)


def _engquist_osher(phys: PhysicalFlux, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if phys.is_linear:
        c = float(phys.linear_speed)  # type: ignore[arg-type]
        return phys.f(a) if c >= 0 else phys.f(b)
    if phys.minimizer is not None:
        star = phys.minimizer
        return (
            phys.f(np.maximum(a, star))
            + phys.f(np.minimum(b, star))
            - phys.f(np.asarray(star))
        )
    plus = np.vectorize(lambda u: _split_part(phys, u, 1))(a)
    minus = np.vectorize(lambda u: _split_part(phys, u, -1))(b)
    return phys.f(np.zeros_like(a)) + plus + minus


def evaluate(flux: FluxSpec, a: np.ndarray | float, b: np.ndarray | float) -> np.ndarray:
    """
    Evaluate F(a, b), vectorized over broadcastable arrays.

    Example:
        >>> float(evaluate(make_flux("lax_friedrichs", PhysicalFlux.burgers(), 1.0), 1.0, -1.0))
        1.5
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    phys = flux.physical
    match flux.kind:
        case FluxKind.LAX_FRIEDRICHS:
            return 0.5 * (phys.f(a) + phys.f(b) - flux.lf_speed * (b - a))
        case FluxKind.CENTRAL:
            return 0.5 * (phys.f(a) + phys.f(b))
        case FluxKind.LINEAR_UPWIND:
            c = float(phys.linear_speed)  # type: ignore[arg-type]
            return 0.5 * c * (a + b) - 0.5 * abs(c) * (b - a)
        case FluxKind.GODUNOV:
            return _godunov(phys, a, b)
        case FluxKind.ENGQUIST_OSHER:
            return _engquist_osher(phys, a, b)
    raise ConfigError(f"unknown flux kind {flux.kind!r}", field="flux")


def lipschitz_constants(flux: FluxSpec, u_inf: float) -> tuple[float, float]:
    """
    One-sided Lipschitz constants (F1, F2) of F on [-u_inf, u_inf]^2.

    For Lax-Friedrichs both partial derivatives are bounded in modulus by
    (max|f'| + c)/2. Godunov and Engquist-Osher have dF/da in [0, max f'^+]
    and -dF/db in [0, max f'^-].
    """
    if u_inf < 0:
        raise ConfigError(f"u_inf must be >= 0, got {u_inf}", field="u_inf")
    phys = flux.physical
    match flux.kind:
        case FluxKind.LAX_FRIEDRICHS:
            half = 0.5 * (phys.max_speed(u_inf) + flux.lf_speed)
            return half, half
        case FluxKind.LINEAR_UPWIND:
            c = float(phys.linear_speed)  # type: ignore[arg-type]
            return (abs(c), 0.0) if c >= 0 else (0.0, abs(c))
        case FluxKind.GODUNOV | FluxKind.ENGQUIST_OSHER:
            return phys.speed_bounds(u_inf)
        case FluxKind.CENTRAL:
            half = 0.5 * phys.max_speed(u_inf)
            return half, half
    raise ConfigError(f"unknown flux kind {flux.kind!r}", field="flux")


def entropy_defect(flux: FluxSpec, a: float, b: float) -> float:
    """F(a, b)(b - a) - int_a^b f(s) ds; nonpositive for an E-flux."""
    return float(evaluate(flux, a, b)) * (b - a) - flux.physical.integral(a, b)


def is_eflux(flux: FluxSpec, samples: Iterable[tuple[float, float]]) -> bool:
    """
    Check the E-flux inequality on sample pairs.

    Returns:
        True iff every pair has entropy defect <= 1e-12
    """
    worst = max((entropy_defect(flux, a, b) for a, b in samples), default=0.0)
    logger.debug(f"E-flux check for {flux.kind}: worst defect {worst:.3e}")
    return worst <= EFLUX_TOL


def monotonicity_defect(flux: FluxSpec, u_inf: float, n: int = 100) -> float:
    """
    Largest violation of monotonicity on an n x n grid of the invariant box.

    Returns:
        max over finite-difference slopes of (-dF/da, dF/db, 0)
    """
    u = np.linspace(-u_inf, u_inf, n)
    values = evaluate(flux, u[:, None], u[None, :])
    rise_a = -np.diff(values, axis=0).min(initial=0.0)
    rise_b = np.diff(values, axis=1).max(initial=0.0)
    return float(max(rise_a, rise_b, 0.0))


def entropy_flux(
    flux: FluxSpec, a: np.ndarray | float, b: np.ndarray | float, k: float
) -> np.ndarray:
    """
    Numerical entropy flux for |u - k|: F(a v k, b v k) - F(a ^ k, b ^ k).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return evaluate(flux, np.maximum(a, k), np.maximum(b, k)) - evaluate(
        flux, np.minimum(a, k), np.minimum(b, k)
    )
