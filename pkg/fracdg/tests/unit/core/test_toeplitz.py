"""Unit tests for dense and FFT Toeplitz/circulant products."""

import numpy as np
import pytest
import scipy.linalg

from fracdg.app.core.toeplitz import circulant_embedding, circulant_matvec, toeplitz_matvec
from fracdg.app.exceptions import ConfigError

pytestmark = pytest.mark.unit


@pytest.mark.parametrize("n", [1, 7, 64])
def test_fft_matches_dense_for_nonsymmetric_matrix(rng: np.random.Generator, n: int) -> None:
    """Test that the circulant embedding reproduces the dense product."""
    col = rng.normal(size=n)
    row = rng.normal(size=n)
    row[0] = col[0]
    x = rng.normal(size=n)
    expected = scipy.linalg.toeplitz(col, row) @ x
    np.testing.assert_allclose(toeplitz_matvec(col, row, x, "dense"), expected, atol=1e-12)
    np.testing.assert_allclose(toeplitz_matvec(col, row, x, "fft"), expected, atol=1e-12)


def test_symmetric_default_and_stacked_input(rng: np.random.Generator) -> None:
    """Test row=None and a 2D stack of vectors."""
    col = rng.normal(size=10)
    X = rng.normal(size=(3, 10))
    T = scipy.linalg.toeplitz(col)
    np.testing.assert_allclose(toeplitz_matvec(col, None, X, "fft"), X @ T.T, atol=1e-12)


def test_long_column_is_cut(rng: np.random.Generator) -> None:
    """Test that entries beyond the matrix size are ignored."""
    col = rng.normal(size=30)
    x = rng.normal(size=8)
    expected = scipy.linalg.toeplitz(col[:8]) @ x
    np.testing.assert_allclose(toeplitz_matvec(col, None, x, "fft"), expected, atol=1e-12)


def test_circulant_embedding_layout() -> None:
    """Test the 2n embedding column."""
    emb = circulant_embedding(np.array([1.0, 2.0, 3.0]), np.array([1.0, 4.0, 5.0]), 3)
    np.testing.assert_array_equal(emb, [1.0, 2.0, 3.0, 0.0, 5.0, 4.0])


def test_circulant_matvec_methods_agree(rng: np.random.Generator) -> None:
    """Test circulant products against scipy.linalg.circulant."""
    column = rng.normal(size=12)
    x = rng.normal(size=12)
    expected = scipy.linalg.circulant(column) @ x
    np.testing.assert_allclose(circulant_matvec(column, x, "dense"), expected, atol=1e-12)
    np.testing.assert_allclose(circulant_matvec(column, x, "fft"), expected, atol=1e-12)


def test_circulant_size_mismatch() -> None:
    """Test that a column of the wrong length is rejected."""
    with pytest.raises(ConfigError):
        circulant_matvec(np.ones(4), np.ones(5))


def test_unknown_method() -> None:
    """Test that unknown matvec methods are rejected."""
    with pytest.raises(ConfigError):
        toeplitz_matvec(np.ones(3), None, np.ones(3), "sparse")  # type: ignore[arg-type]
