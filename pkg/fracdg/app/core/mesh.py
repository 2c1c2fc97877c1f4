"""Uniform grids, Legendre bases, L2 projection, reconstruction and slope limiting."""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from numpy.polynomial import legendre

from fracdg.app.exceptions import ConfigError, DomainError

logger = logging.getLogger(__name__)

MAX_DEGREE = 2

Boundary = Literal["zero", "periodic"]
Side = Literal["left", "right"]


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform grid of ``n_cells`` cells on ``[x_left, x_right)``.

    Cell ``i`` spans ``[x_left + i*dx, x_left + (i+1)*dx)`` and maps onto the
    reference element ``[-1, 1]``.
    """

    x_left: float
    x_right: float
    n_cells: int

    def __post_init__(self) -> None:
        if self.n_cells < 1:
            raise ConfigError(f"n_cells must be positive, got {self.n_cells}", field="n_cells")
        if not self.x_right > self.x_left:
            raise ConfigError(
                f"empty window [{self.x_left}, {self.x_right}]", field="domain"
            )

    @classmethod
    def from_dx(cls, x_left: float, x_right: float, dx: float) -> "GridSpec":
        """
        Build a grid from a cell width that must tile the window.

        Args:
            x_left: Left end of the window
            x_right: Right end of the window
            dx: Requested cell width

        Returns:
            GridSpec with ``round((x_right - x_left) / dx)`` cells
        """
        if dx <= 0:
            raise ConfigError(f"dx must be positive, got {dx}", field="dx")
        ratio = (x_right - x_left) / dx
        n_cells = round(ratio)
        if n_cells < 1 or abs(ratio - n_cells) > 1e-9 * max(1.0, ratio):
            raise ConfigError(
                f"dx={dx} does not tile the window [{x_left}, {x_right}]", field="dx"
            )
        return cls(x_left=x_left, x_right=x_right, n_cells=n_cells)

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    @property
    def cell_edges(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n_cells + 1)

    @property
    def cell_centers(self) -> np.ndarray:
        return self.x_left + self.dx * (np.arange(self.n_cells) + 0.5)

    def coordinate(self, i: int | np.ndarray, xi: float | np.ndarray = 0.0) -> np.ndarray:
        """Physical coordinate of reference point ``xi`` in cell ``i``."""
        return self.x_left + self.dx * (np.asarray(i) + 0.5 * (np.asarray(xi) + 1.0))

    def cell_index(self, x: float | np.ndarray, side: Side = "right") -> np.ndarray:
        """
        Index of the cell holding ``x``.

        Args:
            x: Physical coordinate(s) inside the closed window
            side: ``"right"`` picks the cell to the right of an interface (limit
                x^+), ``"left"`` the cell to its left (limit x^-)

        Returns:
            Integer cell index array (0-d for scalar input)
        """
        x = np.asarray(x, dtype=float)
        tol = 1e-12 * max(1.0, abs(self.x_left), abs(self.x_right))
        if np.any(x < self.x_left - tol) or np.any(x > self.x_right + tol):
            raise DomainError(f"point outside the window [{self.x_left}, {self.x_right}]")
        s = (x - self.x_left) / self.dx
        if side == "right":
            idx = np.floor(s + 1e-12)
        else:
            idx = np.ceil(s - 1e-12) - 1
        return np.clip(idx, 0, self.n_cells - 1).astype(int)

    def to_reference(self, x: float | np.ndarray, i: int | np.ndarray) -> np.ndarray:
        """Reference coordinate of ``x`` relative to cell ``i``."""
        return 2.0 * (np.asarray(x) - self.x_left) / self.dx - 2.0 * np.asarray(i) - 1.0

    def refinement_ratio(self, coarse: "GridSpec") -> int:
        """
        Number of cells of this grid per cell of ``coarse``.

        Raises:
            ConfigError: If the grids do not share the window or are not nested
        """
        same_window = math.isclose(self.x_left, coarse.x_left, abs_tol=1e-12) and math.isclose(
            self.x_right, coarse.x_right, abs_tol=1e-12
        )
        if not same_window or self.n_cells % coarse.n_cells != 0:
            raise ConfigError(
                f"grid with {self.n_cells} cells does not refine one with {coarse.n_cells}",
                field="dx",
            )
        return self.n_cells // coarse.n_cells


@dataclass(frozen=True, eq=False)
class PolyState:
    """
    Legendre coefficients ``U[p, i]`` of a piecewise polynomial on ``grid``.

    The reconstruction on cell ``i`` is ``sum_p U[p, i] * P_p(xi)``.
    """

    coeffs: np.ndarray
    grid: GridSpec

    def __post_init__(self) -> None:
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if coeffs.shape[0] - 1 > MAX_DEGREE:
            raise DomainError(f"degree {coeffs.shape[0] - 1} exceeds {MAX_DEGREE}")
        if coeffs.shape[1] != self.grid.n_cells:
            raise ConfigError(
                f"coefficient array has {coeffs.shape[1]} cells, grid has {self.grid.n_cells}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return int(self.coeffs.shape[0] - 1)

    @property
    def averages(self) -> np.ndarray:
        return self.coeffs[0]

    def with_coeffs(self, coeffs: np.ndarray) -> "PolyState":
        return PolyState(coeffs=coeffs, grid=self.grid)

    def right_traces(self) -> np.ndarray:
        """Values u(x_{i+1}^-) on every cell."""
        return self.coeffs.sum(axis=0)

    def left_traces(self) -> np.ndarray:
        """Values u(x_i^+) on every cell."""
        signs = (-1.0) ** np.arange(self.degree + 1)
        return signs @ self.coeffs

    def cell_l2_squared(self) -> np.ndarray:
        """Per-cell squared L2 norms via Legendre orthogonality."""
        weights = self.grid.dx / (2.0 * np.arange(self.degree + 1) + 1.0)
        return weights @ self.coeffs**2


def legendre_eval(p: int, xi: float | np.ndarray) -> np.ndarray:
    """
    Evaluate the Legendre polynomial P_p on the reference element.

    Args:
        p: Degree, 0 <= p <= 2
        xi: Reference coordinate(s) in [-1, 1]

    Returns:
        P_p(xi); P_p(1) = 1 and P_p(-1) = (-1)^p

    Example:
        >>> float(legendre_eval(2, 0.0))
        -0.5
    """
    if not 0 <= p <= MAX_DEGREE:
        raise DomainError(f"Legendre degree {p} outside 0..{MAX_DEGREE}")
    xi = np.asarray(xi, dtype=float)
    if p == 0:
        return np.ones_like(xi)
    if p == 1:
        return xi.copy()
    return 0.5 * (3.0 * xi**2 - 1.0)


def legendre_derivative(p: int, xi: float | np.ndarray) -> np.ndarray:
    """d/dxi of P_p on the reference element."""
    if not 0 <= p <= MAX_DEGREE:
        raise DomainError(f"Legendre degree {p} outside 0..{MAX_DEGREE}")
    xi = np.asarray(xi, dtype=float)
    if p == 0:
        return np.zeros_like(xi)
    if p == 1:
        return np.ones_like(xi)
    return 3.0 * xi


def basis_matrix(k: int, xi: np.ndarray) -> np.ndarray:
    """Rows P_0..P_k evaluated at ``xi``; shape (k+1, len(xi))."""
    return np.stack([legendre_eval(p, xi) for p in range(k + 1)])


@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _check_degree(k: int) -> None:
    if not 0 <= k <= MAX_DEGREE:
        raise DomainError(f"degree {k} outside 0..{MAX_DEGREE}")


def project_l2(
    u0: Callable[[np.ndarray], np.ndarray],
    grid: GridSpec,
    k: int,
    breakpoints: Sequence[float] = (),
    n_nodes: int | None = None,
) -> PolyState:
    """
    L2-project a function onto piecewise polynomials of degree ``k``.

    Cells containing a breakpoint of ``u0`` are split there and each piece is
    integrated separately, so piecewise polynomial data are projected exactly.

    Args:
        u0: Vectorized function of x
        grid: Target grid
        k: Polynomial degree (0, 1 or 2)
        breakpoints: Points where ``u0`` or its derivatives jump
        n_nodes: Gauss nodes per piece; defaults to k + 2

    Returns:
        PolyState with U[q, i] = (2q+1)/dx * int_{I_i} u0 phi_{q,i}
    """
    _check_degree(k)
    n_nodes = n_nodes or k + 2
    nodes, weights = gauss_legendre(n_nodes)

    edges = grid.cell_edges
    inner = [b for b in breakpoints if grid.x_left < b < grid.x_right]
    points = np.unique(np.concatenate([edges, np.asarray(inner, dtype=float)]))
    a, b = points[:-1], points[1:]
    mid = 0.5 * (a + b)
    cells = grid.cell_index(mid)

    x = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * nodes[None, :]
    values = np.asarray(u0(x), dtype=float)
    if values.shape != x.shape:
        values = np.broadcast_to(values, x.shape)
    if not np.isfinite(values).all():
        raise ConfigError("initial datum produced non-finite samples", field="u0")

    xi = grid.to_reference(x, cells[:, None])
    coeffs = np.zeros((k + 1, grid.n_cells))
    for q in range(k + 1):
        piece = (values * legendre_eval(q, xi) * weights[None, :]).sum(axis=1)
        piece *= 0.5 * (b - a)
        np.add.at(coeffs[q], cells, piece)
        coeffs[q] *= (2 * q + 1) / grid.dx
    return PolyState(coeffs=coeffs, grid=grid)


def sample(state: PolyState, x: float | np.ndarray, side: Side = "right") -> np.ndarray:
    """Vectorized reconstruction of ``state`` at the points ``x``."""
    idx = state.grid.cell_index(x, side=side)
    xi = state.grid.to_reference(x, idx)
    values = np.zeros_like(np.asarray(xi, dtype=float))
    for p in range(state.degree + 1):
        values = values + state.coeffs[p][idx] * legendre_eval(p, xi)
    return values


def reconstruct(state: PolyState, x: float, side: Side = "right") -> float:
    """
    Evaluate the piecewise polynomial at ``x``.

    At an interface ``side="right"`` gives the limit from the right (the
    polynomial of the cell starting there) and ``side="left"`` the limit from
    the left.

    Raises:
        DomainError: If ``x`` lies outside the grid window
    """
    return float(sample(state, x, side=side))


def minmod(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Elementwise minmod of three arrays."""
    same_sign = np.logical_and(a * b > 0, b * c > 0)
    smallest = np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c)))
    return np.where(same_sign, np.sign(a) * smallest, 0.0)


def tvb_minmod(a: np.ndarray, b: np.ndarray, c: np.ndarray, threshold: float) -> np.ndarray:
    """Minmod that leaves ``a`` untouched where ``|a| <= threshold``."""
    return np.where(np.abs(a) <= threshold, a, minmod(a, b, c))


def neighbor_means(averages: np.ndarray, boundary: Boundary) -> tuple[np.ndarray, np.ndarray]:
    """Left and right neighbor averages with zero or periodic extension."""
    if boundary == "periodic":
        return np.roll(averages, 1), np.roll(averages, -1)
    padded = np.concatenate([[0.0], averages, [0.0]])
    return padded[:-2], padded[2:]


def tvb_limit(state: PolyState, M: float = 0.0, boundary: Boundary = "zero") -> PolyState:
    """
    TVB minmod slope limiter.

    Cell averages are kept; the slope coefficient becomes
    minmod(U1, forward difference, backward difference) unless it is below
    ``M * dx**2``. Limited cells lose their curvature coefficient.

    Args:
        state: Piecewise polynomial of degree >= 1
        M: TVB parameter; 0 is plain minmod, ``math.inf`` disables limiting
        boundary: Neighbor rule at the window edges

    Returns:
        Limited state (the input itself for k = 0 or M = inf)
    """
    if state.degree == 0 or math.isinf(M):
        return state
    means = state.averages
    left, right = neighbor_means(means, boundary)
    slope = state.coeffs[1]
    limited_slope = tvb_minmod(slope, right - means, means - left, M * state.grid.dx**2)
    changed = np.abs(limited_slope - slope) > 1e-14 * np.maximum(1.0, np.abs(slope))
    if not changed.any():
        return state
    coeffs = np.array(state.coeffs)
    coeffs[1] = np.where(changed, limited_slope, slope)
    if state.degree == 2:
        coeffs[2] = np.where(changed, 0.0, coeffs[2])
    logger.debug(f"Limited {int(changed.sum())} of {state.grid.n_cells} cells")
    return state.with_coeffs(coeffs)


def total_variation_of_means(state: PolyState, boundary: Boundary = "zero") -> float:
    """Total variation of the cell-average sequence, exterior included."""
    means = state.averages
    if boundary == "periodic":
        return float(np.abs(np.diff(np.append(means, means[0]))).sum())
    return float(np.abs(np.diff(np.concatenate([[0.0], means, [0.0]]))).sum())


def prolong(state: PolyState, fine: GridSpec) -> PolyState:
    """
    Exactly represent ``state`` on a nested finer grid.

    Args:
        state: Piecewise polynomial on the coarse grid
        fine: Grid refining ``state.grid``

    Returns:
        PolyState on ``fine`` with the same reconstruction
    """
    ratio = fine.refinement_ratio(state.grid)
    k = state.degree
    nodes, weights = gauss_legendre(k + 1)
    j = np.arange(fine.n_cells)
    parent = j // ratio
    offset = j % ratio
    xi_coarse = (2.0 * offset[:, None] + 1.0 + nodes[None, :]) / ratio - 1.0
    values = np.zeros_like(xi_coarse)
    for p in range(k + 1):
        values += state.coeffs[p][parent][:, None] * legendre_eval(p, xi_coarse)
    coeffs = np.stack(
        [
            0.5 * (2 * q + 1) * (values * legendre_eval(q, nodes)[None, :] * weights).sum(axis=1)
            for q in range(k + 1)
        ]
    )
    return PolyState(coeffs=coeffs, grid=fine)


def restrict(state: PolyState, coarse: GridSpec, k: int | None = None) -> PolyState:
    """
    L2-project a fine-grid piecewise polynomial onto a nested coarse grid.

    Args:
        state: Piecewise polynomial on the fine grid
        coarse: Grid coarsening ``state.grid``
        k: Target degree; defaults to the degree of ``state``

    Returns:
        PolyState on ``coarse``; cell averages are exact means of the fine data
    """
    k = state.degree if k is None else k
    _check_degree(k)
    ratio = state.grid.refinement_ratio(coarse)
    nodes, weights = gauss_legendre(state.degree + k + 1)
    fine_values = np.zeros((state.grid.n_cells, nodes.size))
    for p in range(state.degree + 1):
        fine_values += state.coeffs[p][:, None] * legendre_eval(p, nodes)[None, :]
    offset = np.arange(state.grid.n_cells) % ratio
    xi_coarse = (2.0 * offset[:, None] + 1.0 + nodes[None, :]) / ratio - 1.0
    coeffs = np.zeros((k + 1, coarse.n_cells))
    for q in range(k + 1):
        piece = (fine_values * legendre_eval(q, xi_coarse) * weights[None, :]).sum(axis=1)
        coeffs[q] = 0.5 * (2 * q + 1) * piece.reshape(coarse.n_cells, ratio).sum(axis=1) / ratio
    return PolyState(coeffs=coeffs, grid=coarse)
