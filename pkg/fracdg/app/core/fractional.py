"""Discrete fractional Laplacian: weights, fast application and implicit solves.

The operator is g[u](x) = c_lambda * int (u(x+z) - u(x)) / |z|^(1+lambda) dz with
c_lambda fixed so that its Fourier symbol is -|xi|^lambda. On piecewise
constants it acts through the Toeplitz weights G_m = int_{I_i} g[1_{I_{i+m}}];
on piecewise polynomials of degree k through the tables W[m][q][p].

Two boundary rules are supported. ``zero`` extends the data by zero outside
the window (the computational region Omega). ``periodic`` folds the
infinite stencil onto the window; the analytic far-field tail is returned as a
mean-field term so that constants stay in the kernel exactly.
"""

import csv
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.sparse.linalg
import scipy.special

from fracdg.app.core.base import get_settings
from fracdg.app.core.mesh import MAX_DEGREE, Boundary, gauss_legendre, legendre_eval
from fracdg.app.core.toeplitz import MatvecMethod, circulant_matvec, toeplitz_matvec
from fracdg.app.exceptions import ConfigError, ConvergenceError, DomainError, NumericalError

logger = logging.getLogger(__name__)


def _check_lambda(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise ConfigError(f"lambda must lie in (0, 1), got {lam}", field="lambda")


def normalization_c_lambda(lam: float) -> float:
    """
    Normalization making the singular integral's symbol equal to -|xi|^lambda.

    Args:
        lam: Order of the operator, 0 < lam < 1

    Returns:
        c_lambda = lam * 2^(lam-1) * Gamma((1+lam)/2) / (sqrt(pi) * Gamma(1 - lam/2))

    Example:
        >>> round(normalization_c_lambda(0.5), 4)
        0.1995
    """
    _check_lambda(lam)
    return float(
        lam
        * 2.0 ** (lam - 1.0)
        * scipy.special.gamma(0.5 * (1.0 + lam))
        / (math.sqrt(math.pi) * scipy.special.gamma(1.0 - 0.5 * lam))
    )


def d_lambda(lam: float, c_lambda: float | None = None) -> float:
    """d_lambda = c_lambda * (2/(1-lam) + 2/lam), the diagonal weight factor."""
    _check_lambda(lam)
    c = normalization_c_lambda(lam) if c_lambda is None else c_lambda
    return c * (2.0 / (1.0 - lam) + 2.0 / lam)


def l1_bound_constant(lam: float, c_lambda: float | None = None) -> float:
    """Constant C in ||g[u]||_L1 <= C ||u||_L1^(1-lam) |u|_BV^lam."""
    _check_lambda(lam)
    c = normalization_c_lambda(lam) if c_lambda is None else c_lambda
    return c * (2.0 / (1.0 - lam) + 4.0 / lam)


def _second_difference(m: np.ndarray, beta: float) -> np.ndarray:
    """2 m^beta - (m+1)^beta - (m-1)^beta for integers m >= 1, cancellation-free."""
    m = np.asarray(m, dtype=float)
    out = np.empty_like(m)
    one = m == 1
    out[one] = 2.0 - 2.0**beta
    big = ~one
    mb = m[big]
    out[big] = -(mb**beta) * (
        np.expm1(beta * np.log1p(1.0 / mb)) + np.expm1(beta * np.log1p(-1.0 / mb))
    )
    return out


def weight_offdiag(lam: float, c_lambda: float, dx: float, m: int | np.ndarray) -> np.ndarray:
    """
    Off-diagonal weight G_m = int_{I_0} g[1_{I_m}] dx for m >= 1.

    The double integral of |y - x|^(-1-lam) over I_0 x I_m is a second
    difference of the second antiderivative -r^(1-lam)/(lam(1-lam)):
    G_m = c/(lam(1-lam)) dx^(1-lam) (2 m^(1-lam) - (m+1)^(1-lam) - (m-1)^(1-lam)).

    Returns:
        Positive weights, decreasing in m, ~ c dx^(1-lam) m^(-1-lam) for large m
    """
    _check_lambda(lam)
    m = np.asarray(m)
    if np.any(m < 1):
        raise DomainError("off-diagonal weights need m >= 1")
    beta = 1.0 - lam
    return c_lambda / (lam * beta) * dx**beta * _second_difference(m, beta)


def tail_sum(lam: float, c_lambda: float, dx: float, m: int) -> float:
    """Closed-form sum of G_j over j > m (telescoping second differences)."""
    beta = 1.0 - lam
    first = (m + 1.0) ** beta - float(m) ** beta if m > 0 else 1.0
    return c_lambda / (lam * beta) * dx**beta * first


@dataclass(frozen=True, eq=False)
class FracStencil:
    """
    Toeplitz weights of the cell-averaged fractional Laplacian.

    ``g_tail[m-1]`` holds G_m for m = 1..m_trunc; the weight of cells i, j
    depends on |i - j| only.
    """

    lam: float
    c_lambda: float
    dx: float
    g0: float
    g_tail: np.ndarray
    m_trunc: int

    @property
    def column(self) -> np.ndarray:
        """G_0, G_1, ..., G_{m_trunc}."""
        return np.concatenate([[self.g0], self.g_tail])

    @property
    def d_lambda(self) -> float:
        return -self.g0 / self.dx ** (1.0 - self.lam)

    def weight(self, m: int) -> float:
        m = abs(m)
        if m == 0:
            return self.g0
        return float(self.g_tail[m - 1]) if m <= self.m_trunc else 0.0

    def tail(self, m: int | None = None) -> float:
        """Sum of the weights beyond ``m`` (default: beyond the truncation)."""
        return tail_sum(self.lam, self.c_lambda, self.dx, self.m_trunc if m is None else m)

    def row_sum_defect(self) -> float:
        """g0 + 2 sum G_m + 2 tail; zero up to rounding."""
        return self.g0 + 2.0 * float(self.g_tail.sum()) + 2.0 * self.tail()


def build_stencil(
    lam: float, dx: float, m_trunc: int, c_lambda: float | None = None
) -> FracStencil:
    """
    Build the truncated Toeplitz stencil of g on a grid of width ``dx``.

    Args:
        lam: Operator order in (0, 1)
        dx: Cell width
        m_trunc: Number of off-diagonal weights kept
        c_lambda: Normalization; defaults to the Fourier-symbol choice

    Returns:
        FracStencil with g0 = -d_lambda dx^(1-lam)
    """
    _check_lambda(lam)
    if m_trunc < 1:
        raise ConfigError(f"m_trunc must be >= 1, got {m_trunc}", field="m_trunc")
    if dx <= 0:
        raise ConfigError(f"dx must be positive, got {dx}", field="dx")
    c = normalization_c_lambda(lam) if c_lambda is None else c_lambda
    g0 = -d_lambda(lam, c) * dx ** (1.0 - lam)
    g_tail = weight_offdiag(lam, c, dx, np.arange(1, m_trunc + 1))
    g_tail.setflags(write=False)
    stencil = FracStencil(lam=lam, c_lambda=c, dx=dx, g0=g0, g_tail=g_tail, m_trunc=m_trunc)
    logger.debug(
        f"Built stencil lambda={lam} dx={dx:.6g} m_trunc={m_trunc} "
        f"row_sum_defect={stencil.row_sum_defect():.3e}"
    )
    return stencil


def _resolve_method(method: MatvecMethod, n: int) -> MatvecMethod:
    if method != "auto":
        return method
    return "dense" if n <= get_settings().DENSE_MATVEC_MAX else "fft"


def _images(images: int | None) -> int:
    return get_settings().PERIODIC_IMAGES if images is None else images


@lru_cache(maxsize=64)
def periodic_column(stencil: FracStencil, n: int, images: int) -> np.ndarray:
    """
    Circulant column of the stencil folded onto a periodic window of n cells.

    Weights up to |m| = images * n are folded explicitly; the remaining tail
    is spread evenly (mean-field), which keeps the row sum exactly zero.
    """
    depth = max(images, 1) * n
    m = np.arange(1, depth + 1)
    weights = weight_offdiag(stencil.lam, stencil.c_lambda, stencil.dx, m)
    column = np.zeros(n)
    column[0] = stencil.g0
    column += np.bincount(m % n, weights=weights, minlength=n)
    column += np.bincount((-m) % n, weights=weights, minlength=n)
    column += 2.0 * stencil.tail(depth) / n
    column.setflags(write=False)
    return column


def apply(
    stencil: FracStencil,
    U: np.ndarray,
    boundary: Boundary = "zero",
    method: MatvecMethod = "auto",
    images: int | None = None,
) -> np.ndarray:
    """
    Cell-averaged fractional Laplacian g<U>_i = (1/dx) sum_j G_{|i-j|} U_j.

    Args:
        stencil: Weights built for the grid of ``U``
        U: Cell averages (1D) or a stack of them (2D, last axis = cells)
        boundary: ``"zero"`` (zero outside the window) or ``"periodic"``
        method: ``"dense"``, ``"fft"`` or ``"auto"``
        images: Periodic folding depth (defaults to Settings.PERIODIC_IMAGES)

    Returns:
        Array shaped like ``U``

    Raises:
        ConfigError: If ``U`` has a bad shape, or under zero extension if the
            stencil stops short of the grid (m_trunc < n - 1)
    """
    U = np.asarray(U, dtype=float)
    if U.ndim not in (1, 2) or U.shape[-1] == 0:
        raise ConfigError(f"cannot apply stencil to array of shape {U.shape}")
    n = U.shape[-1]
    chosen = _resolve_method(method, n)
    if boundary == "periodic":
        column = periodic_column(stencil, n, _images(images))
        return circulant_matvec(column, U, chosen) / stencil.dx
    if boundary != "zero":
        raise ConfigError(f"unknown boundary {boundary!r}", field="boundary")
    if stencil.m_trunc < n - 1:
        raise ConfigError(
            f"stencil with m_trunc={stencil.m_trunc} is too short for {n} cells",
            field="m_trunc",
        )
    return toeplitz_matvec(stencil.column, None, U, chosen) / stencil.dx


def operator_matrix(
    stencil: FracStencil, n: int, boundary: Boundary = "zero", images: int | None = None
) -> np.ndarray:
    """Dense n x n matrix of ``apply`` (for diagnostics and small tests)."""
    return apply(stencil, np.eye(n), boundary=boundary, method="dense", images=images).T


def quadratic_form(stencil: FracStencil, U: np.ndarray, boundary: Boundary = "zero") -> float:
    """dx * <g<U>, U>; never positive."""
    U = np.asarray(U, dtype=float)
    return float(stencil.dx * np.dot(apply(stencil, U, boundary=boundary), U))


def solve_implicit(
    stencil: FracStencil,
    dt: float,
    rhs: np.ndarray,
    boundary: Boundary = "zero",
    tol: float | None = None,
    max_iter: int | None = None,
    omega: float = 1.0,
    method: MatvecMethod = "auto",
    images: int | None = None,
) -> np.ndarray:
    """
    Solve v - dt * g<v> = rhs.

    The system matrix is a strictly diagonally dominant M-matrix, so a
    (damped) Jacobi sweep started from ``rhs`` converges and every iterate
    stays between min(rhs, 0) and max(rhs, 0) (between min and max of rhs on
    a periodic window). Conjugate gradients on the symmetric system take over
    if the sweep hits its cap.

    Args:
        stencil: Weights of g
        dt: Time step, > 0
        rhs: Right-hand side h
        boundary: ``"zero"`` or ``"periodic"``
        tol: Relative sup-norm residual target (default Settings.IMPLICIT_TOL)
        max_iter: Jacobi cap (default Settings.IMPLICIT_MAX_ITER)
        omega: Jacobi damping factor in (0, 1]
        method: Matvec method
        images: Periodic folding depth

    Returns:
        v with ||v - dt g<v> - rhs||_inf <= tol ||rhs||_inf

    Raises:
        ConvergenceError: If neither Jacobi nor CG reach the tolerance
    """
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}", field="dt")
    if not 0.0 < omega <= 1.0:
        raise ConfigError(f"omega must lie in (0, 1], got {omega}", field="omega")
    settings = get_settings()
    tol = settings.IMPLICIT_TOL if tol is None else tol
    max_iter = settings.IMPLICIT_MAX_ITER if max_iter is None else max_iter

    h = np.asarray(rhs, dtype=float)
    scale = float(np.max(np.abs(h))) if h.size else 0.0
    if scale == 0.0:
        return np.zeros_like(h)
    n = h.size
    chosen = _resolve_method(method, n)
    if boundary == "periodic":
        self_weight = float(periodic_column(stencil, n, _images(images))[0])
    else:
        self_weight = stencil.g0
    diagonal = 1.0 - dt * self_weight / stencil.dx

    def system(v: np.ndarray) -> np.ndarray:
        return v - dt * apply(stencil, v, boundary=boundary, method=chosen, images=images)

    target = tol * scale
    v = h.copy()
    residual = h - system(v)
    iterations = 0
    while float(np.max(np.abs(residual))) > target and iterations < max_iter:
        v = v + omega * residual / diagonal
        residual = h - system(v)
        iterations += 1
    res_norm = float(np.max(np.abs(residual)))
    logger.debug(f"Jacobi solve: {iterations} iterations, residual {res_norm:.3e}")
    if res_norm <= target:
        return v

    logger.info(f"Jacobi stalled at residual {res_norm:.3e}; switching to conjugate gradients")
    operator = scipy.sparse.linalg.LinearOperator((n, n), matvec=system, dtype=float)
    v, info = scipy.sparse.linalg.cg(operator, h, x0=v, rtol=0.1 * tol, atol=0.0, maxiter=max_iter)
    res_norm = float(np.max(np.abs(h - system(v))))
    if res_norm > target:
        raise ConvergenceError(
            f"implicit solve did not converge (cg info={info})",
            iterations=iterations + max_iter,
            residual=res_norm,
        )
    return np.asarray(v)


@dataclass(frozen=True, eq=False)
class DGWeightTable:
    """
    Nonlocal DG coupling integrals.

    ``weights[m + m_trunc, q, p] = int_{I_0} phi_{q,0} g[phi_{p,m}] dx`` for
    |m| <= m_trunc; the table is invariant under (m, q, p) -> (-m, p, q).
    """

    lam: float
    c_lambda: float
    dx: float
    k: int
    m_trunc: int
    weights: np.ndarray

    def entry(self, m: int, q: int, p: int) -> float:
        if abs(m) > self.m_trunc:
            return 0.0
        return float(self.weights[m + self.m_trunc, q, p])

    def block(self, m: int) -> np.ndarray:
        return np.asarray(self.weights[m + self.m_trunc])


_JACOBI_NODES = 8
_LEGENDRE_S_NODES = 16
_LEGENDRE_X_NODES = 4


def _jacobi_unit(lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^1 s^(-lam) f(s) ds."""
    t, w = scipy.special.roots_jacobi(_JACOBI_NODES, 0.0, -lam)
    return 0.5 * (1.0 + t), 2.0 ** (lam - 1.0) * w


def _overlap_moments(s: np.ndarray, m: float | np.ndarray, k: int) -> np.ndarray:
    """
    A_qp(s) = int P_q(2x-1) P_p(2(x+s-m)-1) over x in [0,1], x+s in [m,m+1].

    Unit cell width. ``m`` broadcasts against ``s``; output has shape
    (k+1, k+1, *s.shape).
    """
    nodes, weights = gauss_legendre(_LEGENDRE_X_NODES)
    m = np.broadcast_to(np.asarray(m, dtype=float), s.shape)
    lo = np.maximum(0.0, m - s)
    hi = np.minimum(1.0, m + 1.0 - s)
    length = np.clip(hi - lo, 0.0, None)
    x = 0.5 * (lo + hi)[..., None] + 0.5 * length[..., None] * nodes
    own = np.stack([legendre_eval(q, 2.0 * x - 1.0) for q in range(k + 1)])
    other = np.stack([legendre_eval(p, 2.0 * (x + (s - m)[..., None]) - 1.0) for p in range(k + 1)])
    integrand = own[:, None] * other[None, :] * weights
    return 0.5 * length * integrand.sum(axis=-1)


def _self_difference_moments(s: np.ndarray, k: int) -> np.ndarray:
    """B_qp(s) = int (P_p(x+s)-P_p(x)) (P_q(x+s)-P_q(x)) over x, x+s in [0,1], s >= 0."""
    nodes, weights = gauss_legendre(_LEGENDRE_X_NODES)
    length = 1.0 - s
    x = 0.5 * length[..., None] * (nodes + 1.0)
    diff = np.stack(
        [
            legendre_eval(p, 2.0 * (x + s[..., None]) - 1.0) - legendre_eval(p, 2.0 * x - 1.0)
            for p in range(k + 1)
        ]
    )
    integrand = diff[:, None] * diff[None, :] * weights
    return 0.5 * length * integrand.sum(axis=-1)


def _unit_self_block(lam: float, c: float, k: int) -> np.ndarray:
    """W[0] on a unit cell."""
    s, w = _jacobi_unit(lam)
    interior = (_self_difference_moments(s, k) / s * w).sum(axis=-1)
    x, wx = _jacobi_unit(lam)
    basis = np.stack([legendre_eval(q, 2.0 * x - 1.0) for q in range(k + 1)])
    edge = (basis[:, None] * basis[None, :] * wx).sum(axis=-1)
    parity = 1.0 + (-1.0) ** np.add.outer(np.arange(k + 1), np.arange(k + 1))
    return -c * interior - (c / lam) * parity * edge


def _unit_offdiag_blocks(lam: float, c: float, k: int, m_max: int) -> np.ndarray:
    """W[m] for m = 1..m_max on a unit cell; shape (m_max, k+1, k+1)."""
    blocks = np.zeros((m_max, k + 1, k + 1))
    s_j, w_j = _jacobi_unit(lam)
    near = _overlap_moments(s_j, 1, k)
    blocks[0] += c * (near / s_j * w_j).sum(axis=-1)

    nodes, weights = gauss_legendre(_LEGENDRE_S_NODES)
    half = 0.5 * (nodes + 1.0)
    m = np.arange(1, m_max + 1, dtype=float)
    # piece s in [m, m+1] for all m, and s in [m-1, m] for m >= 2
    for start_shift, first in ((0.0, 1), (-1.0, 2)):
        mm = m[first - 1 :]
        s = (mm + start_shift)[:, None] + half[None, :]
        moments = _overlap_moments(s, mm[:, None], k)
        kernel = s ** (-1.0 - lam) * 0.5 * weights
        blocks[first - 1 :] += c * np.moveaxis((moments * kernel).sum(axis=-1), -1, 0)
    return blocks


def build_dg_weights(
    lam: float, dx: float, k: int, m_trunc: int, c_lambda: float | None = None
) -> DGWeightTable:
    """
    Build the nonlocal DG coupling table for Legendre bases of degree k.

    Cross-cell entries reduce to one-dimensional integrals of |s|^(-1-lam)
    against the overlap correlation of the two basis polynomials; the
    self-cell entries use the symmetric quadratic-form representation, split
    into an interior part with an O(s) integrand and a boundary part with an
    x^(-lam) weight. Singular pieces use Gauss-Jacobi rules, the others
    Gauss-Legendre rules; all integrands are polynomial or analytic.

    Args:
        lam: Operator order in (0, 1)
        dx: Cell width
        k: Degree (0, 1 or 2)
        m_trunc: Largest cell offset kept
        c_lambda: Normalization; defaults to the Fourier-symbol choice

    Returns:
        DGWeightTable scaled by dx^(1-lam)

    Raises:
        NumericalError: If the table fails its consistency check against the
            closed-form piecewise-constant weights
    """
    _check_lambda(lam)
    if not 0 <= k <= MAX_DEGREE:
        raise DomainError(f"degree {k} outside 0..{MAX_DEGREE}")
    if m_trunc < 1:
        raise ConfigError(f"m_trunc must be >= 1, got {m_trunc}", field="m_trunc")
    c = normalization_c_lambda(lam) if c_lambda is None else c_lambda
    scale = dx ** (1.0 - lam)

    weights = np.zeros((2 * m_trunc + 1, k + 1, k + 1))
    weights[m_trunc] = _unit_self_block(lam, c, k) * scale
    positive = _unit_offdiag_blocks(lam, c, k, m_trunc) * scale
    weights[m_trunc + 1 :] = positive
    weights[:m_trunc] = np.transpose(positive[::-1], (0, 2, 1))

    expected = np.concatenate(
        [[-d_lambda(lam, c) * scale], weight_offdiag(lam, c, dx, np.arange(1, m_trunc + 1))]
    )
    got = weights[m_trunc:, 0, 0]
    error = float(np.max(np.abs(got - expected) / np.abs(expected)))
    if not np.isfinite(weights).all() or error > 1e-10:
        raise NumericalError(f"DG weight quadrature did not converge (relative error {error:.3e})")
    weights.setflags(write=False)
    logger.debug(f"Built DG weights k={k} lambda={lam} m_trunc={m_trunc}")
    return DGWeightTable(lam=lam, c_lambda=c, dx=dx, k=k, m_trunc=m_trunc, weights=weights)


@lru_cache(maxsize=16)
def _periodic_dg_columns(table: DGWeightTable, n: int) -> np.ndarray:
    """Circulant columns c[q, p, r] of the folded table on n periodic cells."""
    m = np.arange(-table.m_trunc, table.m_trunc + 1)
    columns = np.zeros((table.k + 1, table.k + 1, n))
    for q in range(table.k + 1):
        for p in range(table.k + 1):
            columns[q, p] = np.bincount((-m) % n, weights=table.weights[:, q, p], minlength=n)
    columns[0, 0] += 2.0 * tail_sum(table.lam, table.c_lambda, table.dx, table.m_trunc) / n
    columns.setflags(write=False)
    return columns


def apply_dg(
    table: DGWeightTable,
    coeffs: np.ndarray,
    boundary: Boundary = "zero",
    method: MatvecMethod = "auto",
) -> np.ndarray:
    """
    Nonlocal DG term N[q, i] = sum_m sum_p W[m][q][p] U[p, i+m].

    Args:
        table: Coupling table of matching degree
        coeffs: Coefficients U of shape (k+1, n)
        boundary: ``"zero"`` or ``"periodic"``
        method: Matvec method

    Returns:
        Array of shape (k+1, n); int_{I_i} g[u] phi_{q,i} for each q, i
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != table.k + 1:
        raise ConfigError(f"table of degree {table.k} applied to degree {coeffs.shape[0] - 1}")
    n = coeffs.shape[1]
    chosen = _resolve_method(method, n)
    out = np.zeros_like(coeffs)
    if boundary == "periodic":
        columns = _periodic_dg_columns(table, n)
        for q in range(table.k + 1):
            for p in range(table.k + 1):
                out[q] += circulant_matvec(columns[q, p], coeffs[p], chosen)
        return out
    if boundary != "zero":
        raise ConfigError(f"unknown boundary {boundary!r}", field="boundary")
    center = table.m_trunc
    for q in range(table.k + 1):
        for p in range(table.k + 1):
            row = table.weights[center:, q, p]
            col = table.weights[center::-1, q, p]
            out[q] += toeplitz_matvec(col, row, coeffs[p], chosen)
    return out


def dump_stencil_csv(stencil: FracStencil, path: str | Path) -> Path:
    """
    Write the stencil as ``m,G_m`` rows (m = 0..m_trunc) with a parameter header.

    Returns:
        Path of the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(
            f"# lambda={stencil.lam!r} c_lambda={stencil.c_lambda!r} dx={stencil.dx!r}\n"
        )
        writer = csv.writer(handle)
        writer.writerow(["m", "G_m"])
        for m, value in enumerate(stencil.column):
            writer.writerow([m, f"{value:.17g}"])
    logger.info(f"Stencil written: {path} ({stencil.m_trunc + 1} weights)")
    return path


def load_stencil_csv(path: str | Path) -> FracStencil:
    """Read a stencil written by ``dump_stencil_csv``."""
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        header = handle.readline().lstrip("#").split()
        params = dict(item.split("=", 1) for item in header)
        rows = list(csv.DictReader(handle))
    try:
        lam = float(params["lambda"])
        c = float(params["c_lambda"])
        dx = float(params["dx"])
    except KeyError as e:
        raise ConfigError(f"stencil file {path} misses header field {e}") from e
    values = np.array([float(row["G_m"]) for row in rows])
    g_tail = values[1:]
    g_tail.setflags(write=False)
    return FracStencil(
        lam=lam, c_lambda=c, dx=dx, g0=float(values[0]), g_tail=g_tail, m_trunc=g_tail.size
    )
