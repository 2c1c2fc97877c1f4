"""Unit tests for exact norms of piecewise polynomials."""

import math

import numpy as np
import pytest

from fracdg.app.core.mesh import GridSpec, PolyState
from fracdg.app.core.norms import as_state, difference, jumps, max_slope, norm
from fracdg.app.exceptions import ConfigError

pytestmark = pytest.mark.unit


def _single_cell(coeffs: list[float], dx: float = 1.0) -> PolyState:
    return PolyState(np.array(coeffs, dtype=float)[:, None], GridSpec(0.0, dx, 1))


def test_indicator_norms() -> None:
    """Test L1, L-infinity and BV of a one-cell indicator."""
    U = np.array([0.0, 1.0, 0.0])
    assert norm(U, "1", dx=0.1) == pytest.approx(0.1)
    assert norm(U, "inf", dx=0.1) == 1.0
    assert norm(U, "bv", dx=0.1) == pytest.approx(2.0)
    assert norm(U, 2, dx=0.1) == pytest.approx(math.sqrt(0.1))


def test_bv_counts_interior_variation() -> None:
    """Test BV of a linear middle cell between zero cells."""
    state = PolyState(np.array([[0.0, 0.0, 0.0], [0.0, 0.5, 0.0]]), GridSpec(0.0, 3.0, 3))
    assert norm(state, "bv") == pytest.approx(2.0)


def test_bv_exterior_rules() -> None:
    """Test that jumps to the outside count only on request."""
    U = np.array([1.0, 3.0, 2.0])
    assert norm(U, "bv", dx=1.0) == pytest.approx(3.0)
    assert norm(U, "bv", dx=1.0, exterior="zero") == pytest.approx(6.0)
    assert norm(U, "bv", dx=1.0, exterior="periodic") == pytest.approx(4.0)


def test_l1_of_sign_changing_cells() -> None:
    """Test that |u| is integrated exactly across sign changes."""
    assert norm(_single_cell([0.0, 1.0]), "1") == pytest.approx(0.5)
    assert norm(_single_cell([0.0, 0.0, 1.0], dx=2.0), "1") == pytest.approx(
        4.0 / (3.0 * math.sqrt(3.0))
    )


def test_l2_of_linear_cell() -> None:
    """Test the L2 norm of u = xi on a unit cell."""
    assert norm(_single_cell([0.0, 1.0]), "2") == pytest.approx(math.sqrt(1.0 / 3.0))


def test_sup_at_endpoint_and_vertex() -> None:
    """Test sup norms attained at an endpoint and at an interior vertex."""
    assert norm(_single_cell([1.0, 0.5, 0.1]), "inf") == pytest.approx(1.6)
    # u = 1.5 xi^2 - 0.5 has |u| = 0.5 at xi = 0 and 1 at xi = +-1
    assert norm(_single_cell([0.0, 0.0, 1.0]), "inf") == pytest.approx(1.0)
    assert norm(_single_cell([0.0, 0.0, -0.2]), "inf") == pytest.approx(0.2)


def test_l1_matches_fine_quadrature(rng: np.random.Generator) -> None:
    """Test the exact L1 norm against a fine midpoint sum."""
    state = PolyState(rng.normal(size=(3, 5)), GridSpec(0.0, 1.0, 5))
    xi = (np.arange(4000) + 0.5) / 2000 - 1.0
    values = (
        state.coeffs[0][:, None]
        + state.coeffs[1][:, None] * xi
        + state.coeffs[2][:, None] * (1.5 * xi**2 - 0.5)
    )
    approx = np.abs(values).mean(axis=1).sum() * state.grid.dx
    assert norm(state, "1") == pytest.approx(approx, rel=1e-5)


def test_jumps() -> None:
    """Test interface jumps with each exterior rule."""
    state = PolyState(np.array([[1.0, 3.0, 2.0]]), GridSpec(0.0, 3.0, 3))
    np.testing.assert_allclose(jumps(state), [2.0, -1.0])
    np.testing.assert_allclose(jumps(state, "zero"), [1.0, 2.0, -1.0, -2.0])
    np.testing.assert_allclose(jumps(state, "periodic"), [2.0, -1.0, -1.0])
    with pytest.raises(ConfigError):
        jumps(state, "reflect")  # type: ignore[arg-type]


def test_bad_arguments() -> None:
    """Test unknown norms and averages without a cell width."""
    with pytest.raises(ConfigError):
        norm(np.ones(3), "3", dx=1.0)
    with pytest.raises(ConfigError) as info:
        as_state(np.ones(3))
    assert info.value.field == "dx"


def test_difference_on_nested_grids() -> None:
    """Test that a coarse constant minus its fine copy vanishes on the fine grid."""
    coarse = PolyState(np.array([[1.0, -1.0]]), GridSpec(0.0, 1.0, 2))
    fine_coeffs = np.array([[1.0, 1.0, -1.0, -1.0], [0.1, 0.0, 0.0, 0.0]])
    fine = PolyState(fine_coeffs, GridSpec(0.0, 1.0, 4))
    diff = difference(coarse, fine)
    assert diff.grid.n_cells == 4
    assert diff.degree == 1
    np.testing.assert_allclose(diff.coeffs, [[0.0, 0.0, 0.0, 0.0], [-0.1, 0.0, 0.0, 0.0]])


def test_max_slope() -> None:
    """Test difference quotients across cells and slopes inside cells."""
    assert max_slope(as_state(np.array([0.0, 1.0, 0.0]), dx=0.5)) == pytest.approx(2.0)
    state = PolyState(np.array([[0.0, 0.0], [0.5, 0.0]]), GridSpec(0.0, 2.0, 2))
    assert max_slope(state) == pytest.approx(1.0)
