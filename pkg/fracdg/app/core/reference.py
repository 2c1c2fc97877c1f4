"""
Reference solutions: Fourier spectral solver for the linear equation and
fine-grid self references.

The real line is replaced by a periodic box; padding the computational window
keeps wrap-around effects below the decay threshold of the data.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.fft

from fracdg.app.core.mesh import GridSpec, PolyState, gauss_legendre, restrict, sample
from fracdg.app.core.schemes import SchemeConfig, run
from fracdg.app.exceptions import ConfigError, DomainError

logger = logging.getLogger(__name__)

DECAY_TOL = 1e-8
INTERPOLATION_CHUNK = 512


@dataclass(frozen=True)
class SpectralGrid:
    """Equispaced periodic sampling of [x_left, x_left + length) with n_modes points."""

    x_left: float
    length: float
    n_modes: int

    def __post_init__(self) -> None:
        if self.n_modes < 2 or self.n_modes & (self.n_modes - 1):
            raise ConfigError(
                f"n_modes must be a power of two, got {self.n_modes}", field="n_modes"
            )
        if self.length <= 0:
            raise ConfigError(f"period length must be positive, got {self.length}", field="length")

    @classmethod
    def for_window(
        cls, x_left: float, x_right: float, n_modes: int, padding: float = 2.0
    ) -> "SpectralGrid":
        """
        Periodic box centred on the window [x_left, x_right].

        Args:
            padding: Period length in units of the window length; 1 makes the
                window itself the period
        """
        if padding < 1:
            raise ConfigError(f"padding must be >= 1, got {padding}", field="padding")
        length = padding * (x_right - x_left)
        centre = 0.5 * (x_left + x_right)
        return cls(x_left=centre - 0.5 * length, length=length, n_modes=n_modes)

    @property
    def dx(self) -> float:
        return self.length / self.n_modes

    @property
    def x(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n_modes)

    @property
    def xi(self) -> np.ndarray:
        """Angular frequencies of the rfft coefficients."""
        return 2.0 * np.pi * scipy.fft.rfftfreq(self.n_modes, d=self.dx)

    def sample(self, u: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return np.asarray(u(self.x), dtype=float)


def _check_decay(samples: np.ndarray) -> None:
    peak = float(np.max(np.abs(samples)))
    edge = max(abs(float(samples[0])), abs(float(samples[-1])))
    if peak > 0 and edge > DECAY_TOL * peak:
        raise DomainError(
            f"data does not decay at the box edges ({edge:.3e} vs peak {peak:.3e}); "
            "increase the padding"
        )


def spectral_linear_solve(
    samples: np.ndarray,
    c: float,
    lam: float,
    t: float,
    grid: SpectralGrid,
    check_decay: bool = True,
) -> np.ndarray:
    """
    Exact solution of u_t + c u_x = g[u] on the periodic box.

    Each Fourier mode is multiplied by exp(-(i c xi + |xi|^lam) t).

    Args:
        samples: u0 on ``grid.x``
        c: Advection speed
        lam: Fractional order in (0, 1]
        t: Time, >= 0
        grid: Spectral grid
        check_decay: Reject data that do not vanish at the box edges

    Returns:
        u(., t) on ``grid.x``

    Raises:
        DomainError: If the data do not decay at the box edges
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.n_modes,):
        raise ConfigError(f"expected {grid.n_modes} samples, got shape {samples.shape}")
    if t < 0:
        raise ConfigError(f"t must be >= 0, got {t}", field="t")
    if check_decay:
        _check_decay(samples)
    xi = grid.xi
    multiplier = np.exp(-(1j * c * xi + np.abs(xi) ** lam) * t)
    return scipy.fft.irfft(scipy.fft.rfft(samples) * multiplier, n=grid.n_modes)


def fractional_heat_solve(
    samples: np.ndarray, lam: float, t: float, grid: SpectralGrid, check_decay: bool = True
) -> np.ndarray:
    """Convolution with the fractional heat kernel: the c = 0 case of spectral_linear_solve."""
    return spectral_linear_solve(samples, 0.0, lam, t, grid, check_decay=check_decay)


def spectral_apply(samples: np.ndarray, lam: float, grid: SpectralGrid) -> np.ndarray:
    """g[u] on the grid via the multiplier -|xi|^lam."""
    samples = np.asarray(samples, dtype=float)
    coeffs = scipy.fft.rfft(samples) * -(np.abs(grid.xi) ** lam)
    return scipy.fft.irfft(coeffs, n=grid.n_modes)


def interpolate(samples: np.ndarray, grid: SpectralGrid, x: np.ndarray) -> np.ndarray:
    """
    Trigonometric interpolant of ``samples`` evaluated at arbitrary points.

    The Nyquist mode is taken as a cosine so the interpolant is real.
    """
    x = np.asarray(x, dtype=float)
    n = grid.n_modes
    coeffs = scipy.fft.rfft(np.asarray(samples, dtype=float)) / n
    factor = np.full(coeffs.size, 2.0)
    factor[0] = 1.0
    factor[-1] = 1.0
    weighted = factor * coeffs
    flat = x.ravel() - grid.x_left
    values = np.empty(flat.size)
    for start in range(0, flat.size, INTERPOLATION_CHUNK):
        chunk = flat[start : start + INTERPOLATION_CHUNK]
        phase = np.multiply.outer(chunk, grid.xi)
        values[start : start + chunk.size] = (np.exp(1j * phase) * weighted).real.sum(axis=1)
    return values.reshape(x.shape)


def l2_error_against_samples(
    state: PolyState, samples: np.ndarray, grid: SpectralGrid, n_nodes: int | None = None
) -> float:
    """
    L2 distance on the state's window between a piecewise polynomial and the
    trigonometric interpolant of spectral samples.

    Uses ``n_nodes`` Gauss points per cell (default degree + 3).
    """
    nodes, weights = gauss_legendre(n_nodes or state.degree + 3)
    centres = state.grid.cell_centers
    x = centres[:, None] + 0.5 * state.grid.dx * nodes[None, :]
    diff = sample(state, x) - interpolate(samples, grid, x)
    return float(np.sqrt(0.5 * state.grid.dx * (diff**2 * weights).sum()))


def fine_grid_reference(
    config_factory: Callable[[GridSpec], SchemeConfig],
    u0: Callable[[np.ndarray], np.ndarray],
    x_left: float,
    x_right: float,
    dx_fine: float,
    breakpoints: Sequence[float] = (),
) -> PolyState:
    """
    Run the same scheme on a fine grid and return its final state.

    Args:
        config_factory: Builds the scheme configuration for a given grid
        u0: Initial datum
        x_left: Left end of the window
        x_right: Right end of the window
        dx_fine: Reference cell width; must divide every coarse width studied
        breakpoints: Kinks and jumps of ``u0``

    Returns:
        Final PolyState on the fine grid
    """
    grid = GridSpec.from_dx(x_left, x_right, dx_fine)
    logger.info(f"Computing fine-grid reference with {grid.n_cells} cells")
    config = config_factory(grid)
    return run(config, u0, grid, breakpoints=breakpoints).final


def restrict_to_coarse(fine_state: PolyState, coarse: GridSpec, k: int | None = None) -> PolyState:
    """L2 projection of a fine reference onto a coarse grid; cell means are exact."""
    return restrict(fine_state, coarse, k=k)
