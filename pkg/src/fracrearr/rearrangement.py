"""Discrete rearrangement class: bang-bang densities and the linear oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Density:
    values: np.ndarray
    h: float = 1.0

    @property
    def k(self) -> int:
        return int(np.count_nonzero(self.values))

    @property
    def mass(self) -> float:
        return self.k * self.h if self.bang_bang else float(self.h * self.values.sum())

    @property
    def bang_bang(self) -> bool:
        v = self.values
        return bool(np.all((v == 0.0) | (v == 1.0)))

    @property
    def selected(self) -> np.ndarray:
        return np.flatnonzero(self.values == 1.0)

    @classmethod
    def from_selection(cls, n: int, selected, h: float = 1.0) -> "Density":
        v = np.zeros(n)
        v[np.asarray(selected, dtype=np.int64)] = 1.0
        return cls(v, h)


@dataclass
class ThresholdReport:
    alpha: float  # max of u off the selected set (-inf if everything is selected)
    gamma: float  # min of u on the selected set
    separated: bool
    tie_cells: int
    tol: float

    @property
    def alpha_mid(self) -> float:
        if np.isinf(self.alpha):
            return self.alpha
        return 0.5 * (self.alpha + self.gamma)


def tie_tolerance(u) -> float:
    u = np.asarray(u)
    return 1e-12 * max(1.0, float(np.max(np.abs(u))) if u.size else 1.0)


def _check_k(n, k):
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")


def top_k(u, k: int) -> np.ndarray:
    """Indices of the k largest entries, ties going to the lower index; sorted."""
    u = np.asarray(u, dtype=np.float64)
    _check_k(u.shape[0], k)
    # lexsort keys: last is primary.  Descending value, ascending index.
    order = np.lexsort((np.arange(u.shape[0]), -u))
    return np.sort(order[:k])


def linmax(u, k: int, h: float = 1.0) -> Density:
    """Bang-bang density on the k cells where `u` is largest.

    This maximises ``sum(f * u)`` over all ``0 <= f <= 1`` with ``sum(f) == k``.
    """
    u = np.asarray(u, dtype=np.float64)
    return Density.from_selection(u.shape[0], top_k(u, k), h)


def threshold(u, f: Density) -> ThresholdReport:
    u = np.asarray(u, dtype=np.float64)
    if not f.bang_bang:
        raise ValueError("threshold needs a bang-bang density")
    on = f.values == 1.0
    tol = tie_tolerance(u)
    gamma = float(u[on].min()) if on.any() else np.inf
    alpha = float(u[~on].max()) if (~on).any() else -np.inf
    if np.isinf(alpha):
        ties = 0
    else:
        cut = 0.5 * (alpha + gamma)
        ties = int(np.count_nonzero(np.abs(u - cut) <= tol))
    return ThresholdReport(alpha, gamma, bool(gamma >= alpha - tol), ties, tol)


def indicator_above(u, level: float, h: float = 1.0) -> Density:
    u = np.asarray(u, dtype=np.float64)
    return Density((u > level).astype(np.float64), h)


def random_bangbang(n: int, k: int, seed, h: float = 1.0) -> Density:
    """Uniformly random k-subset; `seed` is anything ``numpy.random.default_rng`` accepts."""
    _check_k(n, k)
    rng = np.random.default_rng(seed)
    return Density.from_selection(n, rng.choice(n, size=k, replace=False), h)
