"""Fractional Dirichlet energy maximisation over rearrangement classes in 1D."""

from ._accel import backend_name
from .grid import Grid, GridError, Interval, build_grid, poincare_constant, snap_mass
from .maximizer import (
    AscentOptions,
    AscentResult,
    BudgetExceeded,
    ascend,
    brute_force,
    compute_J,
    sweep,
    two_component_experiment,
    verify,
)
from .operator import Operator, apply, assemble, energy, kernel_weight, row_constant
from .rearrangement import Density, indicator_above, linmax, random_bangbang, threshold
from .solver import SolveReport, SolverError, solve_direct, solve_iterative

__version__ = "0.1.0"

__all__ = [
    "AscentOptions",
    "AscentResult",
    "BudgetExceeded",
    "Density",
    "Grid",
    "GridError",
    "Interval",
    "Operator",
    "SolveReport",
    "SolverError",
    "apply",
    "ascend",
    "assemble",
    "backend_name",
    "brute_force",
    "build_grid",
    "compute_J",
    "energy",
    "indicator_above",
    "kernel_weight",
    "linmax",
    "poincare_constant",
    "random_bangbang",
    "row_constant",
    "snap_mass",
    "solve_direct",
    "solve_iterative",
    "sweep",
    "threshold",
    "two_component_experiment",
    "verify",
]
