"""Solvers for ``A u = f`` with the symmetric positive definite operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve

from .operator import Operator, _as_field


class SolverError(RuntimeError):
    pass


@dataclass
class SolveReport:
    u: np.ndarray
    residual_inf: float
    iterations: int
    method: str  # "direct" | "iterative"


def _residual(op: Operator, u, f) -> float:
    if u.size == 0:
        return 0.0
    return float(np.max(np.abs(op.matrix @ u - f)))


def solve_direct(op: Operator, f) -> SolveReport:
    f = _as_field(op, f)
    try:
        factor = op.cholesky()
    except LinAlgError as exc:
        raise SolverError(f"Cholesky factorisation failed: {exc}") from exc
    u = cho_solve(factor, f, check_finite=False)
    return SolveReport(u, _residual(op, u, f), 0, "direct")


def solve_iterative(op: Operator, f, tol: float = 1e-10, max_iter: int | None = None) -> SolveReport:
    """Preconditioned conjugate gradients.

    The diagonal of the operator is the constant ``S``, so Jacobi
    preconditioning reduces to scaling by ``1/S``.  Stops once
    ``||A u - f||_2 <= tol * ||f||_2``.
    """
    f = _as_field(op, f)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = 2 * op.n + 10
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    a = op.matrix
    fnorm = np.linalg.norm(f)
    u = np.zeros_like(f)
    if fnorm == 0.0:
        return SolveReport(u, 0.0, 0, "iterative")

    inv_s = 1.0 / op.S
    r = f.copy()
    z = r * inv_s
    p = z.copy()
    rz = r @ z
    goal = tol * fnorm
    for it in range(1, max_iter + 1):
        ap = a @ p
        step = rz / (p @ ap)
        u += step * p
        r -= step * ap
        if np.linalg.norm(r) <= goal:
            # recurrence residual drifts; confirm against the true one
            r = f - a @ u
            if np.linalg.norm(r) <= goal:
                return SolveReport(u, _residual(op, u, f), it, "iterative")
        z = r * inv_s
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverError(f"conjugate gradients did not reach tol={tol} in {max_iter} iterations")
