"""
Time-marching schemes for u_t + f(u)_x = g[u].

Finite-volume schemes (k = 0) come in a fully explicit and an
implicit-explicit variant; the discontinuous Galerkin right-hand side covers
k <= 2 and is marched with a limited SSP-RK3 method.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from fracdg.app.core.base import ensure_finite, get_settings
from fracdg.app.core.fluxes import FluxSpec, entropy_flux, evaluate
from fracdg.app.core.fractional import (
    DGWeightTable,
    FracStencil,
    apply,
    apply_dg,
    build_dg_weights,
    build_stencil,
    solve_implicit,
)
from fracdg.app.core.mesh import (
    MAX_DEGREE,
    Boundary,
    GridSpec,
    PolyState,
    basis_matrix,
    gauss_legendre,
    legendre_derivative,
    project_l2,
    tvb_limit,
)
from fracdg.app.core.toeplitz import MatvecMethod
from fracdg.app.exceptions import ConfigError, NumericalError

logger = logging.getLogger(__name__)


class SchemeKind(StrEnum):
    EXPLICIT_FV = "explicit_fv"
    IMEX_FV = "imex_fv"
    DG_RK3 = "dg_rk3"


@dataclass(frozen=True, eq=False)
class SchemeConfig:
    """
    Everything a step needs besides the state and the step size.

    ``stencil`` is None for equations without the fractional term.
    ``weights`` is required for dg_rk3 with k >= 1 whenever a stencil is set.
    """

    kind: SchemeKind
    k: int
    cfl_safety: float
    t_end: float
    flux: FluxSpec
    stencil: FracStencil | None
    weights: DGWeightTable | None = None
    limiter_M: float = 0.0
    boundary: Boundary = "zero"
    matvec: MatvecMethod = "auto"
    implicit_tol: float | None = None
    dx: float | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.k <= MAX_DEGREE:
            raise ConfigError(f"degree {self.k} outside 0..{MAX_DEGREE}", field="k")
        if self.kind in (SchemeKind.EXPLICIT_FV, SchemeKind.IMEX_FV) and self.k != 0:
            raise ConfigError(f"{self.kind} requires k = 0, got k = {self.k}", field="k")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ConfigError(
                f"cfl_safety must lie in (0, 1], got {self.cfl_safety}", field="cfl_safety"
            )
        if self.t_end < 0:
            raise ConfigError(f"t_end must be >= 0, got {self.t_end}", field="t_end")
        if not self.flux.is_monotone:
            raise ConfigError(f"{self.flux.kind} flux is not monotone", field="flux")
        if self.boundary not in ("zero", "periodic"):
            raise ConfigError(f"unknown boundary {self.boundary!r}", field="boundary")
        if self.stencil is not None and self.k >= 1:
            if self.weights is None:
                raise ConfigError("dg_rk3 with k >= 1 needs a DG weight table", field="weights")
            if self.weights.k != self.k:
                raise ConfigError(
                    f"weight table of degree {self.weights.k} for k = {self.k}", field="weights"
                )

    @property
    def lam(self) -> float | None:
        return None if self.stencil is None else self.stencil.lam

    @property
    def cell_width(self) -> float:
        if self.stencil is not None:
            return self.stencil.dx
        if self.dx is None:
            raise ConfigError("cell width unknown without a stencil; set dx", field="dx")
        return self.dx


def make_scheme(
    kind: SchemeKind | str,
    grid: GridSpec,
    flux: FluxSpec,
    lam: float | None,
    t_end: float,
    k: int = 0,
    cfl_safety: float = 0.9,
    limiter_M: float = 0.0,
    boundary: Boundary = "zero",
    matvec: MatvecMethod = "auto",
    implicit_tol: float | None = None,
) -> SchemeConfig:
    """
    Build a SchemeConfig with the operators for ``grid``.

    With zero extension all offsets inside the window are kept. Periodic DG
    tables are folded over Settings.PERIODIC_IMAGES window lengths.

    Args:
        kind: Scheme name
        grid: Computational grid
        flux: Numerical flux
        lam: Fractional order, or None for a purely convective equation
        t_end: Final time
        k: Polynomial degree
        cfl_safety: Fraction of the CFL bound used as step size
        limiter_M: TVB parameter for dg_rk3 (``math.inf`` disables limiting)
        boundary: ``"zero"`` or ``"periodic"``
        matvec: Matrix-vector method for the nonlocal products
        implicit_tol: Override of Settings.IMPLICIT_TOL for imex_fv

    Returns:
        Validated SchemeConfig
    """
    try:
        kind = SchemeKind(kind)
    except ValueError as e:
        raise ConfigError(f"unknown scheme {kind!r}", field="scheme") from e
    stencil = weights = None
    if lam is not None:
        stencil = build_stencil(lam, grid.dx, max(grid.n_cells - 1, 1))
        if k >= 1:
            depth = (
                get_settings().PERIODIC_IMAGES * grid.n_cells
                if boundary == "periodic"
                else max(grid.n_cells - 1, 1)
            )
            weights = build_dg_weights(lam, grid.dx, k, depth, c_lambda=stencil.c_lambda)
    return SchemeConfig(
        kind=kind,
        k=k,
        cfl_safety=cfl_safety,
        t_end=t_end,
        flux=flux,
        stencil=stencil,
        weights=weights,
        limiter_M=limiter_M,
        boundary=boundary,
        matvec=matvec,
        implicit_tol=implicit_tol,
        dx=grid.dx,
    )


def cfl_dt(config: SchemeConfig, dx: float) -> float:
    """
    Largest step allowed by the scheme's CFL condition, times the safety factor.

    imex_fv: safety * dx / (F1 + F2)
    explicit_fv: safety / ((F1 + F2)/dx + d_lambda/dx^lambda)
    dg_rk3: the explicit bound divided by 2k + 1

    Raises:
        ConfigError: If both the convective and the fractional rate vanish
    """
    if dx <= 0:
        raise ConfigError(f"dx must be positive, got {dx}", field="dx")
    f1, f2 = config.flux.lipschitz
    convective = (f1 + f2) / dx
    fractional = 0.0
    if config.stencil is not None:
        fractional = config.stencil.d_lambda / dx**config.stencil.lam

    if config.kind is SchemeKind.IMEX_FV:
        if convective > 0:
            return config.cfl_safety / convective
        if fractional == 0:
            raise ConfigError("CFL bound undefined: no convection and no fractional term")
        # no convective bound; steps proportional to dx
        return config.cfl_safety * dx
    rate = convective + fractional
    if rate == 0:
        raise ConfigError("CFL bound undefined: no convection and no fractional term")
    dt = config.cfl_safety / rate
    if config.kind is SchemeKind.DG_RK3:
        dt /= 2 * config.k + 1
    return dt


def _pad(values: np.ndarray, boundary: Boundary) -> np.ndarray:
    if boundary == "periodic":
        return np.concatenate([values[-1:], values, values[:1]])
    return np.concatenate([[0.0], values, [0.0]])


def interface_fluxes(U: np.ndarray, flux: FluxSpec, boundary: Boundary = "zero") -> np.ndarray:
    """F at the n+1 interfaces of a cell-average vector, exterior per ``boundary``."""
    padded = _pad(U, boundary)
    return evaluate(flux, padded[:-1], padded[1:])


def _fractional_term(U: np.ndarray, config: SchemeConfig) -> np.ndarray:
    if config.stencil is None:
        return np.zeros_like(U)
    return apply(config.stencil, U, boundary=config.boundary, method=config.matvec)


def step_explicit_fv(U: np.ndarray, config: SchemeConfig, dt: float) -> np.ndarray:
    """
    One step of U_i - dt D-F(U_i, U_{i+1}) + dt g<U>_i.

    Raises:
        NumericalError: If the new state is not finite
    """
    U = np.asarray(U, dtype=float)
    dx = config.cell_width
    fluxes = interface_fluxes(U, config.flux, config.boundary)
    new = U - dt / dx * np.diff(fluxes) + dt * _fractional_term(U, config)
    ensure_finite(new)
    return new


def step_imex_fv(U: np.ndarray, config: SchemeConfig, dt: float) -> np.ndarray:
    """
    Explicit convection followed by an implicit fractional solve.

    Raises:
        ConvergenceError: If the implicit solve fails
        NumericalError: If the new state is not finite
    """
    U = np.asarray(U, dtype=float)
    dx = config.cell_width
    fluxes = interface_fluxes(U, config.flux, config.boundary)
    predictor = U - dt / dx * np.diff(fluxes)
    ensure_finite(predictor, what="convective predictor")
    if config.stencil is None:
        return predictor
    new = solve_implicit(
        config.stencil,
        dt,
        predictor,
        boundary=config.boundary,
        tol=config.implicit_tol,
        method=config.matvec,
    )
    ensure_finite(new)
    return new


def dg_rhs(state: PolyState, config: SchemeConfig) -> np.ndarray:
    """
    Time derivative of the Legendre coefficients of the DG semidiscretization.

    dU_q,i/dt = (2q+1)/dx * [ int f(u) phi_q' + (-1)^q F_i - F_{i+1}
                              + sum_m sum_p W[m][q][p] U_p,i+m ]

    The volume integral uses k + 2 Gauss nodes per cell; the interface flux
    acts on the one-sided traces.

    Returns:
        Array with the shape of ``state.coeffs``
    """
    k = state.degree
    if k != config.k:
        raise ConfigError(f"state of degree {k} for a degree {config.k} scheme", field="k")
    grid = state.grid
    dx = grid.dx
    coeffs = state.coeffs
    phys = config.flux.physical

    rhs = np.zeros_like(coeffs)
    if k >= 1:
        nodes, weights = gauss_legendre(k + 2)
        values = coeffs.T @ basis_matrix(k, nodes)
        f_values = phys.f(values)
        for q in range(1, k + 1):
            rhs[q] = (f_values * legendre_derivative(q, nodes) * weights).sum(axis=1)

    right = _pad(state.right_traces(), config.boundary)[:-1]
    left = _pad(state.left_traces(), config.boundary)[1:]
    fluxes = evaluate(config.flux, right, left)
    signs = (-1.0) ** np.arange(k + 1)
    rhs += signs[:, None] * fluxes[None, :-1] - fluxes[None, 1:]

    if config.stencil is not None:
        if k == 0:
            rhs[0] += dx * apply(
                config.stencil, coeffs[0], boundary=config.boundary, method=config.matvec
            )
        elif config.weights is not None:
            rhs += apply_dg(
                config.weights, coeffs, boundary=config.boundary, method=config.matvec
            )

    rhs *= ((2.0 * np.arange(k + 1) + 1.0) / dx)[:, None]
    ensure_finite(rhs, what="right-hand side")
    return rhs


def step_forward_euler_dg(state: PolyState, config: SchemeConfig, dt: float) -> PolyState:
    """Single forward Euler stage; only offered for k = 0, where it is the explicit FV step."""
    if state.degree != 0:
        raise ConfigError("forward Euler is only available for k = 0", field="k")
    return state.with_coeffs(state.coeffs + dt * dg_rhs(state, config))


def step_rk3(state: PolyState, config: SchemeConfig, dt: float) -> PolyState:
    """
    Shu-Osher SSP-RK3 step with the TVB limiter after every stage.

    Returns:
        State at t + dt
    """

    def limit(coeffs: np.ndarray) -> PolyState:
        stage = state.with_coeffs(coeffs)
        if config.k == 0:
            return stage
        return tvb_limit(stage, M=config.limiter_M, boundary=config.boundary)

    u0 = state.coeffs
    s1 = limit(u0 + dt * dg_rhs(state, config))
    s2 = limit(0.75 * u0 + 0.25 * (s1.coeffs + dt * dg_rhs(s1, config)))
    return limit(u0 / 3.0 + 2.0 / 3.0 * (s2.coeffs + dt * dg_rhs(s2, config)))


def step(state: PolyState, config: SchemeConfig, dt: float) -> PolyState:
    """Advance ``state`` by ``dt`` with the configured scheme."""
    match config.kind:
        case SchemeKind.EXPLICIT_FV:
            return state.with_coeffs(
                step_explicit_fv(state.averages, config, dt)[None, :]
            )
        case SchemeKind.IMEX_FV:
            return state.with_coeffs(
                step_imex_fv(state.averages, config, dt)[None, :]
            )
        case SchemeKind.DG_RK3:
            return step_rk3(state, config, dt)
    raise ConfigError(f"unknown scheme {config.kind!r}", field="scheme")


@dataclass
class Trajectory:
    """Snapshots of a run: ``states[j]`` holds the solution at ``times[j]``."""

    times: list[float] = field(default_factory=list)
    states: list[PolyState] = field(default_factory=list)
    steps: int = 0
    dt: float = 0.0

    @property
    def final(self) -> PolyState:
        return self.states[-1]

    def at(self, t: float) -> PolyState:
        for time, state in zip(self.times, self.states, strict=True):
            if math.isclose(time, t, rel_tol=1e-12, abs_tol=1e-14):
                return state
        raise KeyError(f"no snapshot at t={t}")


def run(
    config: SchemeConfig,
    u0: Callable[[np.ndarray], np.ndarray],
    grid: GridSpec,
    breakpoints: Sequence[float] = (),
    snapshot_times: Sequence[float] = (),
    on_step: Callable[[float, PolyState], None] | None = None,
) -> Trajectory:
    """
    Project ``u0`` and march to ``config.t_end``.

    Steps are shortened to land exactly on every snapshot time and on t_end.

    Args:
        config: Scheme configuration
        u0: Vectorized initial datum
        grid: Computational grid
        breakpoints: Kinks and jumps of ``u0`` for exact projection
        snapshot_times: Extra output times in (0, t_end)
        on_step: Optional callback receiving (t, state) after every step

    Returns:
        Trajectory starting with the projection at t = 0 and ending at t_end

    Raises:
        NumericalError: With the time and cell of the first non-finite value
    """
    state = project_l2(u0, grid, config.k, breakpoints=breakpoints)
    trajectory = Trajectory(times=[0.0], states=[state])
    logger.info(
        f"Projected initial datum: {grid.n_cells} cells, k={config.k}, "
        f"|u0|_inf~{float(np.max(np.abs(state.averages))):.4g}"
    )
    if config.t_end == 0:
        return trajectory

    dt = cfl_dt(config, grid.dx)
    trajectory.dt = dt
    logger.info(f"Marching {config.kind} to t={config.t_end} with dt={dt:.4e}")
    eps = 1e-12 * max(1.0, config.t_end)
    targets = sorted({t for t in snapshot_times if eps < t < config.t_end - eps} | {config.t_end})

    t = 0.0
    for target in targets:
        while t < target - eps:
            h = min(dt, target - t)
            try:
                state = step(state, config, h)
            except NumericalError as e:
                if e.time is None:
                    e.time = t + h
                logger.error(f"Run aborted: {e}")
                raise
            t = target if target - (t + h) <= eps else t + h
            trajectory.steps += 1
            if on_step is not None:
                on_step(t, state)
        trajectory.times.append(target)
        trajectory.states.append(state)
        logger.debug(f"Snapshot at t={target:.6g} after {trajectory.steps} steps")
    logger.info(f"Reached t={config.t_end} in {trajectory.steps} steps")
    return trajectory


def mass_outflow(U: np.ndarray, config: SchemeConfig, dt: float, dx: float) -> float:
    """
    Mass leaving the window in one explicit FV step.

    dx * sum(U_new) = dx * sum(U) - mass_outflow(U, config, dt, dx) holds to
    rounding, for either boundary rule.
    """
    U = np.asarray(U, dtype=float)
    fluxes = interface_fluxes(U, config.flux, config.boundary)
    boundary_flux = dt * float(fluxes[-1] - fluxes[0])
    nonlocal_gain = dt * dx * float(_fractional_term(U, config).sum())
    return boundary_flux - nonlocal_gain


def cell_entropy_residual(
    U_old: np.ndarray,
    U_new: np.ndarray,
    config: SchemeConfig,
    dt: float,
    k: float,
) -> np.ndarray:
    """
    Per-cell defect of the discrete entropy inequality for the entropy |u - k|.

    imex_fv:
        |U_new - k| - |U_old - k| + dt/dx (Q_{i+1/2} - Q_{i-1/2})
        - dt sgn(U_new - k) g<U_new>
    explicit_fv:
        |U_new - k| - |U_old - k| + dt/dx (Q_{i+1/2} - Q_{i-1/2})
        - dt g<|U_old - k|> - dt |g<k>|

    Q is the numerical entropy flux on the old state with the same exterior
    values as the scheme. Nonpositive entries (up to rounding and solver
    tolerance) mean the inequality holds.
    """
    if config.stencil is None:
        raise ConfigError("entropy residual needs the fractional stencil")
    U_old = np.asarray(U_old, dtype=float)
    U_new = np.asarray(U_new, dtype=float)
    dx = config.stencil.dx
    padded = _pad(U_old, config.boundary)
    Q = entropy_flux(config.flux, padded[:-1], padded[1:], k)
    residual = np.abs(U_new - k) - np.abs(U_old - k) + dt / dx * np.diff(Q)
    match config.kind:
        case SchemeKind.IMEX_FV:
            residual -= dt * np.sign(U_new - k) * _fractional_term(U_new, config)
        case SchemeKind.EXPLICIT_FV:
            residual -= dt * _fractional_term(np.abs(U_old - k), config)
            residual -= dt * np.abs(_fractional_term(np.full_like(U_old, k), config))
        case _:
            raise ConfigError("entropy residual is defined for the FV schemes only", field="scheme")
    return residual


def assemble_linear_operator(config: SchemeConfig, grid: GridSpec) -> np.ndarray:
    """
    Dense matrix A with dg_rhs(U) = A U for a linear flux (coefficients flattened q-major).

    Intended for small grids.
    """
    if not config.flux.physical.is_linear:
        raise ConfigError("operator assembly requires a linear flux", field="flux")
    size = (config.k + 1) * grid.n_cells
    columns = []
    for j in range(size):
        unit = np.zeros(size)
        unit[j] = 1.0
        state = PolyState(coeffs=unit.reshape(config.k + 1, grid.n_cells), grid=grid)
        columns.append(dg_rhs(state, config).reshape(-1))
    return np.stack(columns, axis=1)
