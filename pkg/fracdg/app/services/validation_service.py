"""Reduced property suite: operator weights, implicit solve bounds and scheme stability."""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from fracdg.app.core.fluxes import PhysicalFlux, make_flux, monotonicity_defect
from fracdg.app.core.fractional import (
    build_dg_weights,
    build_stencil,
    normalization_c_lambda,
    solve_implicit,
    weight_offdiag,
)
from fracdg.app.core.mesh import GridSpec, PolyState
from fracdg.app.core.norms import norm
from fracdg.app.core.schemes import cfl_dt, make_scheme, step, step_rk3

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def quadrature_weight(lam: float, m: int) -> float:
    """G_m on a unit grid by adaptive quadrature of the inner-integrated kernel."""
    c = normalization_c_lambda(lam)

    def inner(x: float) -> float:
        return ((m - x) ** -lam - (m + 1.0 - x) ** -lam) / lam

    value, _ = scipy.integrate.quad(inner, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return c * value


class ValidationService:
    """
    Runs a fast subset of the property checks used by the test suite.

    Args:
        lam: Fractional order used by every check
        n_cells: Grid size for the scheme checks
        seed: Seed of the random data
    """

    def __init__(self, lam: float = 0.5, n_cells: int = 64, seed: int = 0) -> None:
        self.lam = lam
        self.n_cells = n_cells
        self.rng = np.random.default_rng(seed)
        self.grid = GridSpec(-1.5, 1.5, n_cells)

    def run_all(self) -> list[CheckResult]:
        checks: list[Callable[[], CheckResult]] = [
            self.check_weights,
            self.check_row_sums,
            self.check_implicit_bounds,
            self.check_flux_monotonicity,
            self.check_fv_schemes,
            self.check_dg_l2_decay,
        ]
        results = []
        for check in checks:
            result = check()
            level = logging.INFO if result.passed else logging.WARNING
            status = "ok" if result.passed else "FAILED"
            logger.log(level, f"{result.name}: {status} ({result.detail})")
            results.append(result)
        return results

    def check_weights(self) -> CheckResult:
        c = normalization_c_lambda(self.lam)
        m = np.arange(1, 21)
        closed = weight_offdiag(self.lam, c, 1.0, m)
        oracle = np.array([quadrature_weight(self.lam, int(j)) for j in m])
        error = float(np.max(np.abs(closed - oracle) / oracle))
        table = build_dg_weights(self.lam, 1.0, 1, 20, c_lambda=c)
        parity = max(
            abs(table.entry(j, q, p) - (-1) ** (p + q) * table.entry(-j, q, p))
            for j in range(0, 21)
            for q in range(2)
            for p in range(2)
        )
        return CheckResult(
            "weights vs quadrature",
            error <= 1e-8 and parity <= 1e-12,
            f"max relative error {error:.2e}, DG parity defect {parity:.2e}",
        )

    def check_row_sums(self) -> CheckResult:
        stencil = build_stencil(self.lam, self.grid.dx, 4096)
        defect = abs(stencil.row_sum_defect()) / abs(stencil.g0)
        return CheckResult("row sums", defect <= 1e-10, f"relative defect {defect:.2e}")

    def check_implicit_bounds(self, samples: int = 20) -> CheckResult:
        stencil = build_stencil(self.lam, self.grid.dx, self.n_cells)
        worst = 0.0
        for _ in range(samples):
            h = self.rng.normal(size=self.n_cells)
            dt = float(self.rng.uniform(1e-3, 1e-1))
            v = solve_implicit(stencil, dt, h, tol=1e-13, method="dense")
            worst = max(
                worst,
                float(np.max(v - max(h.max(), 0.0))),
                float(np.max(min(h.min(), 0.0) - v)),
                float(np.abs(v).sum() - np.abs(h).sum()),
            )
        return CheckResult("implicit solve bounds", worst <= 1e-12, f"worst excess {worst:.2e}")

    def check_flux_monotonicity(self) -> CheckResult:
        worst = 0.0
        for kind in ("lax_friedrichs", "engquist_osher", "godunov"):
            flux = make_flux(kind, PhysicalFlux.burgers(), 1.0)
            worst = max(worst, monotonicity_defect(flux, 1.0))
        return CheckResult(
            "flux monotonicity", worst <= 1e-12, f"worst slope violation {worst:.2e}"
        )

    def check_fv_schemes(self) -> CheckResult:
        flux = make_flux("lax_friedrichs", PhysicalFlux.burgers(), 1.0)
        worst = 0.0
        for kind in ("explicit_fv", "imex_fv"):
            config = make_scheme(
                kind, self.grid, flux, self.lam, 1.0, boundary="periodic", implicit_tol=1e-13
            )
            dt = cfl_dt(config, self.grid.dx)
            lower = np.clip(self.rng.uniform(-1, 1, self.n_cells), -1, 1)
            upper = np.minimum(lower + self.rng.uniform(0, 0.5, self.n_cells), 1.0)
            a = step(PolyState(lower[None, :], self.grid), config, dt)
            b = step(PolyState(upper[None, :], self.grid), config, dt)
            worst = max(worst, float(np.max(a.averages - b.averages)))
            for p in ("inf", "1"):
                before = norm(lower, p, dx=self.grid.dx)
                worst = max(worst, norm(a.averages, p, dx=self.grid.dx) - before)
            bv = [
                norm(u, "bv", dx=self.grid.dx, exterior="periodic") for u in (lower, a.averages)
            ]
            worst = max(worst, bv[1] - bv[0])
        return CheckResult(
            "FV monotonicity and decay", worst <= 1e-12, f"worst violation {worst:.2e}"
        )

    def check_dg_l2_decay(self) -> CheckResult:
        flux = make_flux("linear_upwind", PhysicalFlux.linear(1.0), 1.0)
        config = make_scheme(
            "dg_rk3", self.grid, flux, self.lam, 1.0, k=1, cfl_safety=0.5, limiter_M=math.inf
        )
        x = self.grid.cell_centers
        coeffs = np.stack([np.exp(-8.0 * x**2), 0.1 * np.exp(-8.0 * x**2)])
        state = PolyState(coeffs, self.grid)
        dt = cfl_dt(config, self.grid.dx)
        worst = -math.inf
        previous = norm(state, "2")
        for _ in range(20):
            state = step_rk3(state, config, dt)
            current = norm(state, "2")
            worst = max(worst, current - previous)
            previous = current
        return CheckResult("DG L2 decay", worst <= 1e-10, f"largest L2 increase {worst:.2e}")
