"""Lattice-aligned one-dimensional domains.

A domain is a finite union of disjoint open intervals whose endpoints sit on
the lattice ``{m * h}``.  Cells are the lattice cells ``(m h, (m + 1) h)``
lying inside the domain, so every cell centre is ``(m + 1/2) h`` and all
components share one global lattice.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)


class GridError(ValueError):
    """Raised for invalid domain descriptions."""


@dataclass(frozen=True)
class Interval:
    left: float
    right: float

    def __post_init__(self):
        if not self.right > self.left:
            raise GridError(f"interval ({self.left}, {self.right}) has non-positive length")

    @property
    def length(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class SnapReport:
    """Original and snapped endpoints of one interval."""

    original: tuple[float, float]
    snapped: tuple[float, float]

    @property
    def moved(self) -> bool:
        return self.original != self.snapped


@dataclass(frozen=True, eq=False)
class Grid:
    intervals: tuple[Interval, ...]
    h: float
    lattice: np.ndarray  # integer lattice index m of each cell, ascending
    snaps: tuple[SnapReport, ...] = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return int(self.lattice.shape[0])

    @property
    def cells(self) -> np.ndarray:
        return (self.lattice + 0.5) * self.h

    @property
    def diam(self) -> float:
        return self.intervals[-1].right - self.intervals[0].left

    @property
    def gaps(self) -> list[float]:
        return [b.left - a.right for a, b in zip(self.intervals, self.intervals[1:])]

    @property
    def measure(self) -> float:
        return self.n * self.h

    def component_of(self) -> np.ndarray:
        """Component number of every cell (0-based, left to right)."""
        comp = np.empty(self.n, dtype=np.int64)
        pos = 0
        for c, iv in enumerate(self.intervals):
            m = int(round(iv.length / self.h))
            comp[pos : pos + m] = c
            pos += m
        return comp

    def as_pairs(self) -> list[list[float]]:
        return [[iv.left, iv.right] for iv in self.intervals]


def _snap(x: float, h: float) -> int:
    # nearest lattice index, exact ties toward -inf
    return math.ceil(x / h - 0.5)


def build_grid(intervals, h: float) -> Grid:
    """Snap `intervals` onto the lattice of width `h` and enumerate the cells.

    Parameters
    ----------
    intervals : iterable of (left, right) pairs
    h : float
        Cell width, must be positive.

    Raises
    ------
    GridError
        If ``h <= 0``, an interval collapses to zero cells after snapping, or
        two intervals overlap or touch after snapping.
    """
    h = float(h)
    if not (math.isfinite(h) and h > 0):
        raise GridError(f"h must be positive and finite, got {h}")
    pairs = sorted((float(a), float(b)) for a, b in intervals)
    if not pairs:
        raise GridError("domain needs at least one interval")

    snapped = []
    reports = []
    for a, b in pairs:
        if not (math.isfinite(a) and math.isfinite(b)) or not b > a:
            raise GridError(f"interval ({a}, {b}) has non-positive length")
        ma, mb = _snap(a, h), _snap(b, h)
        if mb <= ma:
            raise GridError(f"interval ({a}, {b}) collapses to zero cells at h={h}")
        rep = SnapReport((a, b), (ma * h, mb * h))
        if rep.moved:
            logger.info("snapped interval (%r, %r) to (%r, %r)", a, b, ma * h, mb * h)
        reports.append(rep)
        snapped.append((ma, mb))

    for (_, prev_b), (next_a, _) in zip(snapped, snapped[1:]):
        if next_a <= prev_b:
            raise GridError("intervals overlap or touch after snapping")

    lattice = np.concatenate([np.arange(ma, mb, dtype=np.int64) for ma, mb in snapped])
    ivs = tuple(Interval(ma * h, mb * h) for ma, mb in snapped)
    return Grid(ivs, h, lattice, tuple(reports))


def snap_mass(grid: Grid, beta: float) -> tuple[int, float]:
    """Round the mass constraint to a whole number of cells.

    Returns ``(k, k * h)``; the discrepancy with `beta` is logged.
    """
    beta = float(beta)
    if not (beta > 0 and beta <= grid.measure * (1 + 1e-12)):
        raise GridError(f"beta must lie in (0, {grid.measure}], got {beta}")
    k = int(min(max(round(beta / grid.h), 1), grid.n))
    beta_eff = k * grid.h
    if beta_eff != beta:
        logger.info("mass %r snapped to %d cells (%r)", beta, k, beta_eff)
    return k, beta_eff


def poincare_constant(grid: Grid, s: float) -> float:
    """Geometric Poincare constant ``min_B diam(D u B)^(1+2s) / |B|`` in 1D.

    Two families of balls are candidates: an exterior interval touching the
    hull, whose optimal length is ``diam / (2s)``, and a full interior gap.
    """
    s = float(s)
    if not 0 < s < 1:
        raise GridError(f"s must lie in (0, 1), got {s}")
    d = grid.diam
    p = 1 + 2 * s
    best = 2 * s * d ** (2 * s) * (1 + 1 / (2 * s)) ** p
    for g in grid.gaps:
        best = min(best, d**p / g)
    return best
