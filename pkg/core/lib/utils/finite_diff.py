"""
Three-point derivative stencils on nonuniform grids.

With k = x[i] - x[i-1] and h = x[i+1] - x[i]:

    f'  ~ -h/(k(h+k)) f[i-1] + (h-k)/(hk) f[i] + k/(h(h+k)) f[i+1]
    f'' ~  2/(k(h+k)) f[i-1] - 2/(hk)     f[i] + 2/(h(h+k)) f[i+1]

Both operate on interior nodes only and accept trailing dimensions (shape (n, ...)).
"""

from typing import Tuple

import numpy as np
import scipy.sparse as sp


def _steps(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    dx = np.diff(np.asarray(x, dtype=float))
    return dx[:-1], dx[1:]


def first_derivative(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    k, h = _steps(x)
    f = np.asarray(f, dtype=float)
    shape = (-1,) + (1,) * (f.ndim - 1)
    lo = (-h / (k * (h + k))).reshape(shape)
    mid = ((h - k) / (h * k)).reshape(shape)
    up = (k / (h * (h + k))).reshape(shape)
    return lo * f[:-2] + mid * f[1:-1] + up * f[2:]


def second_derivative(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    k, h = _steps(x)
    f = np.asarray(f, dtype=float)
    shape = (-1,) + (1,) * (f.ndim - 1)
    lo = (2.0 / (k * (h + k))).reshape(shape)
    mid = (-2.0 / (h * k)).reshape(shape)
    up = (2.0 / (h * (h + k))).reshape(shape)
    return lo * f[:-2] + mid * f[1:-1] + up * f[2:]


def dirichlet_laplacian(m: int, h: float) -> sp.csr_matrix:
    """Uniform second-difference matrix on m interior nodes, zero boundary values."""
    main = -2.0 * np.ones(m) / h**2
    off = np.ones(m - 1) / h**2
    return sp.diags([off, main, off], [-1, 0, 1], shape=(m, m), format="csr")
