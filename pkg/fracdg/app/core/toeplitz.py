"""Toeplitz and circulant matrix-vector products, dense and FFT based.

A Toeplitz matrix ``T`` with ``T[i, j] = t[i - j]`` is stored by its first
column ``col = t[0], t[1], ...`` and first row ``row = t[0], t[-1], ...``.
The FFT path embeds it in a circulant of twice the size, whose zero padding
reproduces the zero extension outside the window exactly.
"""

from typing import Literal

import numpy as np
import scipy.fft
import scipy.linalg

from fracdg.app.exceptions import ConfigError

MatvecMethod = Literal["auto", "dense", "fft"]


def _fit(seq: np.ndarray, n: int) -> np.ndarray:
    """Pad with zeros or cut ``seq`` to length ``n``."""
    out = np.zeros(n)
    m = min(n, seq.size)
    out[:m] = seq[:m]
    return out


def circulant_embedding(col: np.ndarray, row: np.ndarray, n: int) -> np.ndarray:
    """
    First column of the 2n circulant embedding an n x n Toeplitz matrix.

    Args:
        col: First column (t[0], t[1], ...), cut or zero-padded to n
        row: First row (t[0], t[-1], ...), cut or zero-padded to n
        n: Matrix size

    Returns:
        Array of length 2n: [t0..t(n-1), 0, t(-(n-1))..t(-1)]
    """
    c = _fit(np.asarray(col, dtype=float), n)
    r = _fit(np.asarray(row, dtype=float), n)
    return np.concatenate([c, [0.0], r[1:][::-1]])


def toeplitz_matvec(
    col: np.ndarray,
    row: np.ndarray | None,
    x: np.ndarray,
    method: MatvecMethod = "fft",
) -> np.ndarray:
    """
    Multiply the Toeplitz matrix (col, row) by ``x``.

    Args:
        col: First column; entries beyond len(x) are ignored
        row: First row; ``None`` means symmetric (row = col)
        x: Vector, or 2D array whose last axis is the matrix axis
        method: ``"dense"`` (scipy.linalg.toeplitz) or ``"fft"``

    Returns:
        T @ x along the last axis
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    row = col if row is None else row
    if method == "dense":
        T = scipy.linalg.toeplitz(
            _fit(np.asarray(col, dtype=float), n), _fit(np.asarray(row, dtype=float), n)
        )
        return x @ T.T
    if method != "fft":
        raise ConfigError(f"unknown matvec method {method!r}", field="method")
    circ_fft = scipy.fft.rfft(circulant_embedding(col, row, n))
    x_fft = scipy.fft.rfft(x, n=2 * n, axis=-1)
    return scipy.fft.irfft(circ_fft * x_fft, n=2 * n, axis=-1)[..., :n]


def circulant_matvec(column: np.ndarray, x: np.ndarray, method: MatvecMethod = "fft") -> np.ndarray:
    """
    Multiply the circulant with first column ``column`` by ``x``.

    Args:
        column: First column c, C[i, j] = c[(i - j) mod n]
        x: Vector or 2D array along the last axis
        method: ``"dense"`` or ``"fft"``

    Returns:
        C @ x along the last axis
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if column.size != n:
        raise ConfigError(f"circulant of size {column.size} applied to length {n}")
    if method == "dense":
        return x @ scipy.linalg.circulant(column).T
    return scipy.fft.irfft(scipy.fft.rfft(column) * scipy.fft.rfft(x, axis=-1), n=n, axis=-1)
