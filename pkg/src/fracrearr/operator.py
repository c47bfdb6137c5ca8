"""Dense discretisation of the unnormalised integral fractional Laplacian.

Row i of the matrix approximates

    p.v. integral of (u(x_i) - u(y)) / |x_i - y|^(1+2s) dy

for u piecewise constant on the cells and zero outside the domain.  The
kernel is integrated exactly over every lattice cell other than the
self-cell; the exterior part of the integral collapses into the constant
diagonal ``S``.  The self-cell contribution is dropped, which costs an
``O(h^(2-2s))`` consistency error for smooth u.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor

from . import kernels
from .grid import Grid


def _check_hs(h, s):
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"h must be positive, got {h}")
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0, 1), got {s}")


def kernel_weight(m, h: float, s: float):
    """Integral of ``r^-(1+2s)`` over ``((m - 1/2) h, (m + 1/2) h)``.

    `m` may be an integer or an integer array, all entries >= 1.
    """
    _check_hs(h, s)
    m_arr = np.asarray(m)
    if np.any(m_arr < 1):
        raise ValueError("kernel_weight needs m >= 1")
    m_arr = m_arr.astype(np.float64)
    w = (((m_arr - 0.5) * h) ** (-2 * s) - ((m_arr + 0.5) * h) ** (-2 * s)) / (2 * s)
    return float(w) if w.ndim == 0 else w


def row_constant(h: float, s: float) -> float:
    """Kernel integral over everything outside the self-cell, ``(h/2)^-2s / s``."""
    _check_hs(h, s)
    return (h / 2) ** (-2 * s) / s


@dataclass(eq=False)
class Operator:
    grid: Grid
    s: float
    matrix: np.ndarray
    S: float
    _cho: tuple | None = field(default=None, init=False, repr=False)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def h(self) -> float:
        return self.grid.h

    def cholesky(self):
        """Lower Cholesky factor, computed once."""
        if self._cho is None:
            self._cho = cho_factor(self.matrix, lower=True, check_finite=False)
        return self._cho


def assemble(grid: Grid, s: float) -> Operator:
    s = float(s)
    _check_hs(grid.h, s)
    idx = grid.lattice
    span = int(idx[-1] - idx[0]) + 1
    weights = np.zeros(span)
    if span > 1:
        weights[1:] = kernel_weight(np.arange(1, span), grid.h, s)
    S = row_constant(grid.h, s)
    a = kernels.fill_operator(idx, weights, S)
    a.setflags(write=False)
    return Operator(grid, s, a, S)


def _as_field(op: Operator, u) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (op.n,):
        raise ValueError(f"expected a field of length {op.n}, got shape {u.shape}")
    return u


def apply(op: Operator, u) -> np.ndarray:
    return op.matrix @ _as_field(op, u)


def energy(op: Operator, u) -> float:
    """Discrete seminorm squared, ``h u^T A u``."""
    u = _as_field(op, u)
    return float(op.h * (u @ (op.matrix @ u)))


def dump_matrix_csv(op: Operator, path) -> None:
    np.savetxt(path, op.matrix, delimiter=",", fmt="%.17g")
