"""Unit tests for the finite-volume and DG time-marching schemes."""

import math
from collections.abc import Callable

import numpy as np
import pytest
import scipy.linalg

from fracdg.app.core.fluxes import FluxSpec, PhysicalFlux, make_flux
from fracdg.app.core.fractional import apply, build_stencil, d_lambda
from fracdg.app.core.mesh import GridSpec, PolyState, project_l2
from fracdg.app.core.norms import norm
from fracdg.app.core.schemes import (
    SchemeConfig,
    SchemeKind,
    assemble_linear_operator,
    cell_entropy_residual,
    cfl_dt,
    dg_rhs,
    make_scheme,
    mass_outflow,
    run,
    step,
    step_explicit_fv,
    step_forward_euler_dg,
    step_imex_fv,
    step_rk3,
)
from fracdg.app.exceptions import ConfigError, NumericalError
from fracdg.app.experiments.presets import get_preset

pytestmark = pytest.mark.unit

FV_KINDS = ["explicit_fv", "imex_fv"]


def _fv_state(values: np.ndarray, grid: GridSpec) -> PolyState:
    return PolyState(np.asarray(values)[None, :], grid)


def _smooth_datum(rng: np.random.Generator) -> Callable[[np.ndarray], np.ndarray]:
    centres = rng.uniform(-0.8, 0.8, 3)
    amplitudes = rng.uniform(-1.0, 1.0, 3)
    widths = rng.uniform(0.1, 0.3, 3)

    def u0(x: np.ndarray) -> np.ndarray:
        return sum(
            a * np.exp(-((x - c) ** 2) / (2 * w**2))
            for a, c, w in zip(amplitudes, centres, widths, strict=True)
        )

    return u0


def test_cfl_explicit_example(upwind: FluxSpec) -> None:
    """Test dt = 1/((F1+F2)/dx + d_lambda/dx^lambda) for upwind transport."""
    grid = GridSpec(0.0, 1.0, 100)
    config = make_scheme("explicit_fv", grid, upwind, 0.5, 1.0, cfl_safety=1.0)
    expected = 1.0 / (1.0 / 0.01 + d_lambda(0.5) / 0.01**0.5)
    assert cfl_dt(config, grid.dx) == pytest.approx(expected)


def test_cfl_imex_without_fractional_term(upwind: FluxSpec) -> None:
    """Test the purely convective imex bound dx/(F1+F2)."""
    grid = GridSpec(0.0, 1.0, 10)
    config = make_scheme("imex_fv", grid, upwind, None, 1.0, cfl_safety=1.0)
    assert cfl_dt(config, grid.dx) == pytest.approx(0.1)


def test_cfl_dg_divides_by_2k_plus_1(burgers_lf: FluxSpec) -> None:
    """Test that the DG bound is the explicit bound over 2k+1."""
    grid = GridSpec(-1.5, 1.5, 30)
    explicit = make_scheme("explicit_fv", grid, burgers_lf, 0.5, 1.0)
    dg = make_scheme("dg_rk3", grid, burgers_lf, 0.5, 1.0, k=1)
    assert cfl_dt(dg, grid.dx) == pytest.approx(cfl_dt(explicit, grid.dx) / 3.0)


def test_cfl_decreases_under_refinement(burgers_lf: FluxSpec) -> None:
    """Test that halving dx shrinks the step."""
    coarse = make_scheme("explicit_fv", GridSpec(-1.5, 1.5, 30), burgers_lf, 0.5, 1.0)
    fine = make_scheme("explicit_fv", GridSpec(-1.5, 1.5, 60), burgers_lf, 0.5, 1.0)
    assert cfl_dt(fine, 0.05) < cfl_dt(coarse, 0.1)


def test_cfl_pure_fractional_imex_uses_dx() -> None:
    """Test the imex fallback step for f = 0."""
    flux = make_flux("lax_friedrichs", PhysicalFlux.zero(), 1.0)
    grid = GridSpec(0.0, 1.0, 20)
    config = make_scheme("imex_fv", grid, flux, 0.5, 1.0, cfl_safety=0.5)
    assert cfl_dt(config, grid.dx) == pytest.approx(0.025)


@pytest.mark.parametrize("kind", FV_KINDS)
def test_cfl_undefined_without_any_rate(kind: str) -> None:
    """Test that no convection and no fractional term is a configuration error."""
    flux = make_flux("lax_friedrichs", PhysicalFlux.zero(), 1.0)
    grid = GridSpec(0.0, 1.0, 20)
    config = make_scheme(kind, grid, flux, None, 1.0)
    with pytest.raises(ConfigError):
        cfl_dt(config, grid.dx)


def test_scheme_config_validation(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test the invariants enforced on construction."""
    with pytest.raises(ConfigError):
        make_scheme("explicit_fv", grid, burgers_lf, 0.5, 1.0, k=1)
    with pytest.raises(ConfigError):
        make_scheme("explicit_fv", grid, burgers_lf, 0.5, 1.0, cfl_safety=0.0)
    with pytest.raises(ConfigError):
        make_scheme("leapfrog", grid, burgers_lf, 0.5, 1.0)
    central = make_flux("central", PhysicalFlux.burgers(), 1.0)
    with pytest.raises(ConfigError) as info:
        make_scheme("dg_rk3", grid, central, 0.5, 1.0, k=1)
    assert info.value.field == "flux"
    stencil = build_stencil(0.5, grid.dx, grid.n_cells - 1)
    with pytest.raises(ConfigError) as info:
        SchemeConfig(SchemeKind.DG_RK3, 1, 0.9, 1.0, burgers_lf, stencil)
    assert info.value.field == "weights"


@pytest.mark.parametrize("kind", FV_KINDS)
def test_fv_constant_periodic_state_is_fixed(
    burgers_lf: FluxSpec, grid: GridSpec, kind: str
) -> None:
    """Test that constants are steady states of the periodic FV schemes."""
    config = make_scheme(kind, grid, burgers_lf, 0.5, 1.0, boundary="periodic", implicit_tol=1e-13)
    dt = cfl_dt(config, grid.dx)
    U = np.full(grid.n_cells, 0.3)
    new = step(_fv_state(U, grid), config, dt).averages
    np.testing.assert_allclose(new, U, atol=1e-12)


def test_dg_constant_periodic_state_is_fixed(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test that a periodic constant is a steady state of the k = 1 scheme."""
    config = make_scheme("dg_rk3", grid, burgers_lf, 0.5, 1.0, k=1, boundary="periodic")
    state = PolyState(np.stack([np.full(grid.n_cells, -0.4), np.zeros(grid.n_cells)]), grid)
    np.testing.assert_allclose(dg_rhs(state, config), 0.0, atol=1e-9)
    new = step_rk3(state, config, cfl_dt(config, grid.dx))
    np.testing.assert_allclose(new.coeffs, state.coeffs, atol=1e-12)


def test_explicit_single_cell_spreads_with_weights(grid: GridSpec) -> None:
    """Test that without convection one explicit step adds dt/dx G_{|i-j|}."""
    flux = make_flux("lax_friedrichs", PhysicalFlux.zero(), 1.0)
    config = make_scheme("explicit_fv", grid, flux, 0.5, 1.0)
    U = np.zeros(grid.n_cells)
    U[20] = 1.0
    dt = cfl_dt(config, grid.dx)
    new = step_explicit_fv(U, config, dt)
    expected = U + dt / grid.dx * np.array(
        [config.stencil.weight(i - 20) for i in range(grid.n_cells)]
    )
    np.testing.assert_allclose(new, expected, rtol=1e-12, atol=1e-15)
    assert np.all(new >= 0)


@pytest.mark.parametrize("kind", FV_KINDS)
def test_fv_schemes_are_monotone(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec, kind: str
) -> None:
    """Test U <= V implies H(U) <= H(V) on 500 random ordered pairs."""
    config = make_scheme(kind, grid, burgers_lf, 0.5, 1.0, matvec="dense", implicit_tol=1e-13)
    dt = cfl_dt(config, grid.dx)
    for _ in range(500):
        lower = rng.uniform(-1.0, 1.0, grid.n_cells)
        upper = np.minimum(lower + rng.uniform(0.0, 0.5, grid.n_cells), 1.0)
        a = step(_fv_state(lower, grid), config, dt).averages
        b = step(_fv_state(upper, grid), config, dt).averages
        assert np.all(a <= b + 1e-12)


@pytest.mark.parametrize("kind", FV_KINDS)
def test_fv_sup_and_l1_decay(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec, kind: str
) -> None:
    """Test that L-infinity and L1 norms do not grow with zero extension."""
    config = make_scheme(kind, grid, burgers_lf, 0.5, 1.0, implicit_tol=1e-13)
    dt = cfl_dt(config, grid.dx)
    for _ in range(20):
        U = rng.uniform(-1.0, 1.0, grid.n_cells)
        new = step(_fv_state(U, grid), config, dt).averages
        for p in ("inf", "1"):
            assert norm(new, p, dx=grid.dx) <= norm(U, p, dx=grid.dx) + 1e-12


@pytest.mark.parametrize("kind", FV_KINDS)
def test_fv_bv_decay_periodic(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec, kind: str
) -> None:
    """Test that the periodic total variation does not grow."""
    config = make_scheme(kind, grid, burgers_lf, 0.5, 1.0, boundary="periodic", implicit_tol=1e-13)
    dt = cfl_dt(config, grid.dx)
    for _ in range(20):
        U = rng.uniform(-1.0, 1.0, grid.n_cells)
        new = step(_fv_state(U, grid), config, dt).averages
        before = norm(U, "bv", dx=grid.dx, exterior="periodic")
        assert norm(new, "bv", dx=grid.dx, exterior="periodic") <= before + 1e-12


def test_explicit_bv_decay_with_zero_exterior(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec
) -> None:
    """Test TV decay of the explicit scheme when jumps to the zero exterior count."""
    config = make_scheme("explicit_fv", grid, burgers_lf, 0.5, 1.0)
    dt = cfl_dt(config, grid.dx)
    for _ in range(20):
        U = rng.uniform(-1.0, 1.0, grid.n_cells)
        new = step_explicit_fv(U, config, dt)
        assert norm(new, "bv", dx=grid.dx, exterior="zero") <= norm(
            U, "bv", dx=grid.dx, exterior="zero"
        ) + 1e-12


@pytest.mark.parametrize("kind", FV_KINDS)
def test_fv_conservation_periodic(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec, kind: str
) -> None:
    """Test that the periodic schemes conserve mass."""
    config = make_scheme(kind, grid, burgers_lf, 0.5, 1.0, boundary="periodic", implicit_tol=1e-13)
    dt = cfl_dt(config, grid.dx)
    state = _fv_state(rng.uniform(-1.0, 1.0, grid.n_cells), grid)
    mass = state.averages.sum() * grid.dx
    for _ in range(20):
        state = step(state, config, dt)
    assert state.averages.sum() * grid.dx == pytest.approx(mass, abs=1e-10)


def _l1_time_constant(kind: str, flux: FluxSpec, n: int) -> float:
    """Largest ||U^{n+1} - U^n||_L1 / dt over a short run with sgn_hat data."""
    preset = get_preset("sgn_hat")
    grid = GridSpec(-1.5, 1.5, n)
    config = make_scheme(kind, grid, flux, 0.5, 0.1)
    previous = project_l2(preset, grid, 0, breakpoints=preset.breakpoints).averages
    last_t = 0.0
    largest = 0.0

    def record(t: float, state: PolyState) -> None:
        nonlocal previous, last_t, largest
        change = norm(state.averages - previous, "1", dx=grid.dx)
        largest = max(largest, change / (t - last_t))
        previous, last_t = state.averages, t

    run(config, preset, grid, breakpoints=preset.breakpoints, on_step=record)
    return largest


@pytest.mark.slow
@pytest.mark.parametrize("kind", FV_KINDS)
def test_fv_l1_time_continuity_is_uniform_in_dx(burgers_lf: FluxSpec, kind: str) -> None:
    """Test that max_n ||U^{n+1} - U^n||_L1 / dt stays bounded under refinement."""
    constants = [_l1_time_constant(kind, burgers_lf, n) for n in (40, 80, 160, 320)]
    assert min(constants) > 0.0
    assert max(constants) / min(constants) <= 2.0, constants


def test_mass_outflow_balances_zero_extension(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec
) -> None:
    """Test dx sum U_new = dx sum U - outflow for the zero-extended explicit scheme."""
    config = make_scheme("explicit_fv", grid, burgers_lf, 0.5, 1.0)
    dt = cfl_dt(config, grid.dx)
    U = rng.uniform(-1.0, 1.0, grid.n_cells)
    new = step_explicit_fv(U, config, dt)
    outflow = mass_outflow(U, config, dt, grid.dx)
    assert grid.dx * new.sum() == pytest.approx(grid.dx * U.sum() - outflow, abs=1e-13)


@pytest.mark.parametrize("kind", FV_KINDS)
def test_cell_entropy_inequality(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec, kind: str
) -> None:
    """Test the discrete entropy inequality for 50 random levels k."""
    config = make_scheme(kind, grid, burgers_lf, 0.5, 1.0, matvec="dense", implicit_tol=1e-13)
    dt = cfl_dt(config, grid.dx)
    for _ in range(50):
        U = rng.uniform(-1.0, 1.0, grid.n_cells)
        new = step(_fv_state(U, grid), config, dt).averages
        level = float(rng.uniform(-1.0, 1.0))
        residual = cell_entropy_residual(U, new, config, dt, level)
        assert np.max(residual) <= 1e-12


def test_entropy_residual_needs_fv_scheme(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test that the residual is only defined for FV schemes with a stencil."""
    U = np.zeros(grid.n_cells)
    dg = make_scheme("dg_rk3", grid, burgers_lf, 0.5, 1.0)
    with pytest.raises(ConfigError):
        cell_entropy_residual(U, U, dg, 0.01, 0.0)
    local = make_scheme("explicit_fv", grid, burgers_lf, None, 1.0)
    with pytest.raises(ConfigError):
        cell_entropy_residual(U, U, local, 0.01, 0.0)


def test_imex_without_stencil_is_convective_step(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test that both FV schemes coincide when the fractional term is absent."""
    explicit = make_scheme("explicit_fv", grid, burgers_lf, None, 1.0)
    imex = make_scheme("imex_fv", grid, burgers_lf, None, 1.0)
    U = np.linspace(-1.0, 1.0, grid.n_cells)
    np.testing.assert_array_equal(step_explicit_fv(U, explicit, 0.01), step_imex_fv(U, imex, 0.01))


@pytest.mark.parametrize("boundary", ["zero", "periodic"])
def test_dg_k0_forward_euler_equals_explicit_fv(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec, boundary: str
) -> None:
    """Test that the k = 0 DG right-hand side reproduces the explicit FV step."""
    fv = make_scheme("explicit_fv", grid, burgers_lf, 0.5, 1.0, boundary=boundary)
    dg = make_scheme("dg_rk3", grid, burgers_lf, 0.5, 1.0, boundary=boundary)
    dt = cfl_dt(fv, grid.dx)
    U = rng.uniform(-1.0, 1.0, grid.n_cells)
    euler = step_forward_euler_dg(_fv_state(U, grid), dg, dt)
    np.testing.assert_allclose(euler.averages, step_explicit_fv(U, fv, dt), atol=1e-13)


def test_forward_euler_only_for_k0(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test that forward Euler refuses k >= 1."""
    config = make_scheme("dg_rk3", grid, burgers_lf, 0.5, 1.0, k=1)
    state = PolyState(np.zeros((2, grid.n_cells)), grid)
    with pytest.raises(ConfigError):
        step_forward_euler_dg(state, config, 0.01)


def test_dg_rhs_degree_mismatch(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test that the state degree must match the scheme."""
    config = make_scheme("dg_rk3", grid, burgers_lf, 0.5, 1.0, k=2)
    with pytest.raises(ConfigError):
        dg_rhs(PolyState(np.zeros((2, grid.n_cells)), grid), config)


def test_dg_rhs_pure_transport_of_linear_profile(upwind: FluxSpec) -> None:
    """Test the k = 1 rhs of u_t + u_x = 0 on an interior linear profile."""
    grid = GridSpec(0.0, 1.0, 10)
    config = make_scheme("dg_rk3", grid, upwind, None, 1.0, k=1)
    state = project_l2(lambda x: 2.0 * x, grid, 1)
    rhs = dg_rhs(state, config)
    np.testing.assert_allclose(rhs[0][1:], -2.0, atol=1e-12)
    np.testing.assert_allclose(rhs[1][1:], 0.0, atol=1e-12)


def test_rk3_is_third_order_taylor_polynomial(
    rng: np.random.Generator, upwind: FluxSpec
) -> None:
    """Test that one linear RK3 step applies I + Z + Z^2/2 + Z^3/6 and is O(dt^4) accurate."""
    grid = GridSpec(-1.0, 1.0, 16)
    config = make_scheme("dg_rk3", grid, upwind, 0.5, 1.0, k=1, limiter_M=math.inf)
    A = assemble_linear_operator(config, grid)
    u = rng.normal(size=(2, grid.n_cells))
    state = PolyState(u, grid)
    dt = cfl_dt(config, grid.dx)
    Z = dt * A
    poly = u.ravel() + Z @ u.ravel() + Z @ Z @ u.ravel() / 2 + Z @ Z @ Z @ u.ravel() / 6
    np.testing.assert_allclose(step_rk3(state, config, dt).coeffs.ravel(), poly, atol=1e-11)

    errors = []
    for h in (0.5 * dt, 0.25 * dt):
        exact = scipy.linalg.expm(h * A) @ u.ravel()
        errors.append(np.linalg.norm(step_rk3(state, config, h).coeffs.ravel() - exact))
    assert errors[0] / errors[1] > 10.0


def test_assemble_needs_linear_flux(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test that operator assembly rejects nonlinear fluxes."""
    config = make_scheme("dg_rk3", grid, burgers_lf, 0.5, 1.0, k=1)
    with pytest.raises(ConfigError):
        assemble_linear_operator(config, grid)


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, 2])
def test_dg_l2_nonincreasing_for_linear_equation(
    rng: np.random.Generator, upwind: FluxSpec, grid: GridSpec, k: int
) -> None:
    """Test that unlimited RK3-DG at half the CFL bound does not increase the L2 norm."""
    config = make_scheme(
        "dg_rk3", grid, upwind, 0.5, 1.0, k=k, cfl_safety=0.5, limiter_M=math.inf
    )
    dt = cfl_dt(config, grid.dx)
    for _ in range(100):
        state = project_l2(_smooth_datum(rng), grid, k)
        previous = norm(state, "2")
        for _ in range(50):
            state = step_rk3(state, config, dt)
            current = norm(state, "2")
            assert current <= previous + 1e-10
            previous = current


def test_run_with_zero_end_time(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test that t_end = 0 returns the projected datum only."""
    config = make_scheme("explicit_fv", grid, burgers_lf, 0.5, 0.0)
    trajectory = run(config, lambda x: np.sin(x), grid)
    assert trajectory.times == [0.0]
    assert trajectory.steps == 0
    assert trajectory.final is trajectory.states[0]


def test_run_lands_on_snapshots(burgers_lf: FluxSpec, grid: GridSpec) -> None:
    """Test that snapshots and the end time are hit exactly."""
    config = make_scheme("imex_fv", grid, burgers_lf, 0.5, 0.1)
    seen: list[float] = []
    trajectory = run(
        config,
        lambda x: -np.sign(x),
        grid,
        breakpoints=(0.0,),
        snapshot_times=[0.05, 0.2, 0.0],
        on_step=lambda t, state: seen.append(t),
    )
    assert trajectory.times == [0.0, 0.05, 0.1]
    assert len(seen) == trajectory.steps
    assert seen[-1] == 0.1
    assert 0.05 in seen
    assert trajectory.at(0.05) is trajectory.states[1]
    with pytest.raises(KeyError):
        trajectory.at(0.07)


def test_run_reports_time_of_blow_up(grid: GridSpec) -> None:
    """Test that a non-finite state aborts the run with time and cell."""
    broken = PhysicalFlux(
        "broken",
        f=lambda u: np.full_like(np.asarray(u, dtype=float), np.nan),
        f_prime=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
    )
    flux = make_flux("lax_friedrichs", broken, 1.0)
    config = make_scheme("explicit_fv", grid, flux, 0.5, 1.0)
    with pytest.raises(NumericalError) as info:
        run(config, lambda x: np.zeros_like(x), grid)
    assert info.value.time == pytest.approx(cfl_dt(config, grid.dx))
    assert info.value.cell == 0


def test_fractional_term_matches_apply(
    rng: np.random.Generator, burgers_lf: FluxSpec, grid: GridSpec
) -> None:
    """Test that the explicit step adds exactly dt g<U> besides convection."""
    config = make_scheme("explicit_fv", grid, burgers_lf, 0.5, 1.0)
    local = make_scheme("explicit_fv", grid, burgers_lf, None, 1.0)
    U = rng.uniform(-1.0, 1.0, grid.n_cells)
    dt = 1e-3
    diff = step_explicit_fv(U, config, dt) - step_explicit_fv(U, local, dt)
    np.testing.assert_allclose(diff, dt * apply(config.stencil, U), atol=1e-14)
