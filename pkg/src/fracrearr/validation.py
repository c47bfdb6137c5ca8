"""Property suites run by ``fracrearr validate``.

Each check returns a :class:`Check`.  ``hard`` checks decide the exit status;
soft ones only warn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from .grid import Grid, build_grid, poincare_constant
from .maximizer import AscentOptions, ascend, brute_force, verify
from .operator import Operator, assemble, energy
from .solver import solve_direct


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    hard: bool = True

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "hard": self.hard, "detail": self.detail}


def operator_violations(op: Operator) -> list[str]:
    """Names of the structural properties `op` fails (empty when it is sound)."""
    a = op.matrix
    bad = []
    if not np.array_equal(a, a.T):
        bad.append("symmetry")
    if not np.all(np.diag(a) == op.S):
        bad.append("constant diagonal")
    off = a - np.diag(np.diag(a))
    if np.any(off > 0):
        bad.append("off-diagonal sign")
    if not np.all(np.abs(off).sum(axis=1) < op.S):
        bad.append("diagonal dominance")
    try:
        cholesky(a, lower=True, check_finite=False)
    except LinAlgError:
        bad.append("cholesky")
    return bad


def manufactured_solution(x, s: float) -> np.ndarray:
    """Solution of ``(-Delta)^s u = 1`` on (-1, 1) for the unnormalised operator."""
    return math.sin(math.pi * s) / math.pi * np.clip(1 - np.asarray(x) ** 2, 0, None) ** s


def manufactured_error(s: float, n: int) -> float:
    """Max relative error of the discrete solution on |x| <= 1/2, f = 1 on (-1, 1)."""
    grid = build_grid([(-1.0, 1.0)], 2.0 / n)
    u = solve_direct(assemble(grid, s), np.ones(grid.n)).u
    x = grid.cells
    inner = np.abs(x) <= 0.5
    exact = manufactured_solution(x[inner], s)
    return float(np.max(np.abs(u[inner] - exact) / exact))


def poincare_ratio(op: Operator, samples: int, rng) -> float:
    """Worst ``h |u|^2 / (C * [u]^2)`` over random fields."""
    c = poincare_constant(op.grid, op.s)
    worst = 0.0
    for _ in range(samples):
        u = rng.standard_normal(op.n)
        worst = max(worst, op.h * float(u @ u) / (c * energy(op, u)))
    return worst


def _grids(extra: Grid | None):
    grids = [
        build_grid([(-1, 1)], 1 / 16),
        build_grid([(0, 1), (2, 3)], 1 / 8),
        build_grid([(-2, -1), (0, 0.5), (1, 2)], 1 / 8),
    ]
    if extra is not None and extra.n <= 1024:
        grids.append(extra)
    return grids


def run_suites(grid: Grid | None = None, s_values=(0.5,), seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    svals = sorted({0.25, 0.75, *s_values})
    checks = []

    ops = [assemble(g, s) for g in _grids(grid) for s in svals]
    bad = [f"n={op.n} s={op.s}: {', '.join(v)}" for op in ops if (v := operator_violations(op))]
    checks.append(Check("operator invariants", not bad, "; ".join(bad) or f"{len(ops)} operators"))

    worst_sup = 0.0
    min_u = math.inf
    for op in ops:
        for _ in range(5):
            f = rng.random(op.n)
            u = solve_direct(op, f).u
            e = energy(op, u)
            worst_sup = max(worst_sup, abs(op.h * f @ u - e) / e)
            min_u = min(min_u, float(u.min()))
    checks.append(Check("sup identity", worst_sup <= 1e-10, f"worst relative gap {worst_sup:.3e}"))
    checks.append(Check("maximum principle", min_u >= -1e-12, f"min u = {min_u:.3e}"))

    ratio = max(poincare_ratio(op, 20, rng) for op in ops)
    checks.append(Check("poincare", ratio <= 1.1, f"worst ratio {ratio:.4f}"))
    if ratio > 1.0:
        checks.append(Check("poincare (strict)", False, f"worst ratio {ratio:.4f} above 1", hard=False))

    errs = {s: (manufactured_error(s, 64), manufactured_error(s, 256)) for s in (0.25, 0.5, 0.75)}
    ok = all(e2 < e1 and e2 <= 0.1 for e1, e2 in errs.values())
    detail = ", ".join(f"s={s}: {e1:.2e}->{e2:.2e}" for s, (e1, e2) in errs.items())
    checks.append(Check("manufactured solution", ok, detail))

    small = build_grid([(0, 1)], 0.1)
    fails = []
    for s in (0.3, 0.7):
        op = assemble(small, s)
        for k in (2, 5):
            res = ascend(op, k, AscentOptions(restarts=5, seed=seed))
            ref = brute_force(op, k)
            if abs(res.energy - ref.energy) > 1e-9 * ref.energy:
                fails.append(f"s={s} k={k}: oracle mismatch")
            if any(np.any(np.diff(t) < -1e-12 * t[-1]) for t in res.traces):
                fails.append(f"s={s} k={k}: trace decreased")
            if not verify(op, res).passed:
                fails.append(f"s={s} k={k}: verification failed")
    checks.append(Check("ascent vs brute force", not fails, "; ".join(fails) or "8 cases"))
    return checks
