"""Acceptance gate: one test per exit criterion, each at its stated tolerance.

Every test appends a one-line verdict to ``RESULTS``; ``conftest.py`` prints
them at the end of the run.
"""

import json
import time
import warnings
from itertools import combinations

import numpy as np
import pytest

from fracrearr.cli import main
from fracrearr.grid import Interval, build_grid, poincare_constant
from fracrearr.maximizer import (
    AscentOptions,
    ascend,
    brute_force,
    subset_energy,
    two_component_experiment,
    verify,
)
from fracrearr.operator import assemble, energy
from fracrearr.rearrangement import indicator_above
from fracrearr.solver import solve_direct
from fracrearr.validation import manufactured_error, operator_violations
from oracles import frac_lap_of_torsion

RESULTS = []


def record(num, name, passed, detail):
    line = f"[{num:>2}] {'PASS' if passed else 'FAIL'}  {name}: {detail}"
    RESULTS.append(line)
    print(line)


def assorted_grids(count, seed, max_cells=512):
    """Lattice-aligned domains with 1-3 components and at most `max_cells` cells."""
    rng = np.random.default_rng(seed)
    grids = []
    while len(grids) < count:
        h = 1 / int(rng.choice([8, 16, 32, 64, 128]))
        ncomp = int(rng.integers(1, 4))
        cells = rng.integers(1, max_cells // ncomp + 1, size=ncomp)
        gaps = rng.integers(1, 40, size=ncomp)
        pos = int(rng.integers(-100, 100))
        ivs = []
        for c, g in zip(cells, gaps):
            ivs.append((pos * h, (pos + int(c)) * h))
            pos += int(c) + int(g)
        grid = build_grid(ivs, h)
        if grid.n <= max_cells:
            grids.append(grid)
    return grids


def mirror_grid(grid):
    return build_grid([(-iv.right, -iv.left) for iv in grid.intervals], grid.h)


# ------------------------------------------------------------------ 1


def test_01_operator_invariants():
    grids = assorted_grids(20, seed=1)
    grids[0] = build_grid([(-1, 1)], 2 / 512)  # include the largest size
    failures = []
    for g in grids:
        for s in (0.25, 0.5, 0.75):
            bad = operator_violations(assemble(g, s))
            if bad:
                failures.append(f"n={g.n} s={s}: {bad}")
    sizes = sorted(g.n for g in grids)
    ncomp = sorted({len(g.intervals) for g in grids})
    record(1, "operator invariants", not failures, f"60 operators, n in [{sizes[0]}, {sizes[-1]}], components {ncomp}")
    assert not failures, failures


# ------------------------------------------------------------------ 2


def test_02_manufactured_solution():
    t0 = time.perf_counter()
    # the closed-form constant is confirmed by quadrature before it is used
    quad_err = max(abs(frac_lap_of_torsion(x, s) - 1) for s in (0.25, 0.5, 0.75) for x in (0.0, 0.25, -0.5))
    errs = {s: (manufactured_error(s, 128), manufactured_error(s, 512)) for s in (0.25, 0.5, 0.75)}
    elapsed = time.perf_counter() - t0
    ok = quad_err < 1e-7 and all(e512 <= 0.05 and e512 < e128 for e128, e512 in errs.values()) and elapsed < 30
    detail = ", ".join(f"s={s}: {a:.2e}->{b:.2e}" for s, (a, b) in errs.items())
    record(2, "manufactured solution", ok, f"{detail}; quadrature check {quad_err:.1e}; {elapsed:.1f}s")
    assert quad_err < 1e-7
    for s, (e128, e512) in errs.items():
        assert e512 <= 0.05, (s, e512)
        assert e512 < e128, (s, e128, e512)
    assert elapsed < 30


# ------------------------------------------------------------------ 3, 4


def test_03_sup_identity():
    rng = np.random.default_rng(3)
    grids = assorted_grids(20, seed=3, max_cells=256)
    worst = 0.0
    for i in range(100):
        g = grids[i % len(grids)]
        op = assemble(g, float(rng.uniform(0.05, 0.95)))
        f = rng.standard_normal(op.n) if i % 2 else rng.random(op.n)
        u = solve_direct(op, f).u
        e = energy(op, u)
        worst = max(worst, abs(op.h * (f @ u) - e) / abs(e))
    record(3, "sup identity", worst <= 1e-10, f"worst relative gap {worst:.2e} over 100 instances")
    assert worst <= 1e-10


def test_04_maximum_principle():
    rng = np.random.default_rng(4)
    grids = assorted_grids(20, seed=4, max_cells=256)
    lowest = np.inf
    for i in range(100):
        op = assemble(grids[i % len(grids)], float(rng.uniform(0.05, 0.95)))
        f = rng.random(op.n) * (rng.random(op.n) < 0.5)  # nonnegative, often sparse
        lowest = min(lowest, float(solve_direct(op, f).u.min()))
    record(4, "maximum principle", lowest >= -1e-12, f"min u = {lowest:.3e} over 100 solves")
    assert lowest >= -1e-12


# ------------------------------------------------------------------ 5


def test_05_poincare():
    rng = np.random.default_rng(5)
    worst = 0.0
    for g in assorted_grids(6, seed=5, max_cells=256):
        for s in (0.25, 0.5, 0.75):
            op = assemble(g, s)
            c = poincare_constant(g, s)
            u = rng.standard_normal((200, op.n))
            quad_form = op.h * np.einsum("ij,jk,ik->i", u, op.matrix, u)
            worst = max(worst, float(np.max(op.h * np.sum(u * u, axis=1) / (c * quad_form))))
    if 1.0 < worst <= 1.1:
        warnings.warn(f"Poincare ratio {worst:.4f} exceeds 1 (within the 1.1 allowance)")
    record(5, "poincare", worst <= 1.1, f"worst h|u|^2 / (C [u]^2) = {worst:.4f}")
    assert worst <= 1.1


# ------------------------------------------------------------------ 6, 8

_RUNS = []


def _maximize_runs():
    """50 seeded ascents across grids, exponents and masses (cached)."""
    if _RUNS:
        return _RUNS
    rng = np.random.default_rng(6)
    grids = assorted_grids(10, seed=6, max_cells=128)
    for i in range(50):
        g = grids[i % len(grids)]
        s = (0.2, 0.4, 0.5, 0.6, 0.8)[i % 5]
        op = assemble(g, s)
        k = int(rng.integers(1, g.n + 1))
        res = ascend(op, k, AscentOptions(restarts=3, seed=i, max_iter=30))
        _RUNS.append((op, res))
    return _RUNS


def test_06_monotone_and_terminating():
    runs = _maximize_runs()
    problems = []
    longest = 0
    for j, (_, res) in enumerate(runs):
        for t in res.traces:
            t = np.asarray(t)
            longest = max(longest, len(t))
            if np.any(np.diff(t) < -1e-12 * abs(t[-1])):
                problems.append(f"run {j}: trace decreased")
        if res.revisited:
            problems.append(f"run {j}: selection revisited")
        if not res.converged:
            problems.append(f"run {j}: no fixed point in 30 iterations")
    record(6, "ascent monotone/terminating", not problems, f"50 runs, longest restart {longest} iterations")
    assert not problems, problems


def _structure_problems(op, res):
    out = []
    ver = verify(op, res)
    if not res.bang_bang:
        out.append("not bang-bang")
    if not res.gamma >= res.alpha:
        out.append("gamma < alpha")
    if res.tie_cells == 0:
        chi = indicator_above(res.u_hat, res.alpha_mid).values
        if not np.array_equal(chi, res.f_hat.values):
            out.append("f != 1{u > alpha_mid}")
        resid = np.max(np.abs(op.matrix @ res.u_hat - chi))
        if resid > 1e-8:
            out.append(f"obstacle residual {resid:.2e}")
    if not ver.passed:
        out.append("verify() failed")
    return out


def test_08_theorem_structure():
    runs = list(_maximize_runs())
    grid = build_grid([(0, 1)], 1 / 14)
    for s in (0.3, 0.7):
        op = assemble(grid, s)
        for k in (3, 5, 7):
            runs.append((op, ascend(op, k, AscentOptions(restarts=10))))
            runs.append((op, brute_force(op, k)))
    problems = []
    worst = 0.0
    ties = 0
    for j, (op, res) in enumerate(runs):
        if not res.converged:
            continue
        problems += [f"run {j}: {p}" for p in _structure_problems(op, res)]
        if res.tie_cells == 0:
            worst = max(worst, res.obstacle_residual_inf)
        else:
            ties += 1
    record(8, "theorem structure", not problems, f"{len(runs)} results, worst obstacle residual {worst:.2e}, {ties} with ties")
    assert not problems, problems


# ------------------------------------------------------------------ 7


def test_07_oracle_equivalence():
    t0 = time.perf_counter()
    grid = build_grid([(0, 1)], 1 / 14)
    assert grid.n == 14
    gaps = {}
    for s in (0.3, 0.7):
        op = assemble(grid, s)
        for k in (3, 5, 7):
            a = ascend(op, k, AscentOptions(restarts=10, seed=0))
            b = brute_force(op, k)
            gaps[(s, k)] = abs(a.energy - b.energy) / b.energy
    elapsed = time.perf_counter() - t0
    worst = max(gaps.values())
    ok = worst <= 1e-9 and elapsed < 60
    record(7, "oracle equivalence", ok, f"6 cells, worst relative gap {worst:.1e}, {elapsed:.1f}s")
    assert worst <= 1e-9, gaps
    assert elapsed < 60


# ------------------------------------------------------------------ 9


def test_09_mirror_symmetry():
    worst = 0.0
    checked = 0
    for ivs, h in [([(-1, 1)], 1 / 7), ([(-1.5, -0.5), (0.5, 1.5)], 1 / 6), ([(-2, -1), (-0.25, 0.25), (1, 2)], 1 / 4)]:
        grid = build_grid(ivs, h)
        assert np.array_equal(mirror_grid(grid).cells, grid.cells)
        for s in (0.3, 0.7):
            op = assemble(grid, s)
            n = op.n
            for k in (2, 3):
                best = brute_force(op, k)
                pairs = [tuple(best.selected)] + list(combinations(range(n), k))[:: max(1, n)]
                for sel in pairs:
                    mirror = sorted(n - 1 - np.asarray(sel))
                    e, em = subset_energy(op, sel), subset_energy(op, mirror)
                    worst = max(worst, abs(e - em) / e)
                    checked += 1
    record(9, "mirror symmetry", worst <= 1e-10, f"{checked} set/mirror pairs, worst relative gap {worst:.1e}")
    assert worst <= 1e-10


# ------------------------------------------------------------------ 10


def test_10_two_component_concentration(tmp_path):
    opts = AscentOptions(restarts=10, seed=0)
    rep = two_component_experiment(Interval(-1.25, -0.25), Interval(0.25, 1.25), 1 / 32, 0.5, 4, opts)
    assert rep.result.k == 4  # beta = 0.125 at h = 1/32
    ok = rep.concentrated and rep.copy_lowers_J
    if not ok:
        warnings.warn("two-component concentration heuristic did not manifest")
    # the same experiment through the CLI, as a reproducible artifact
    cfg = tmp_path / "twoball.json"
    cfg.write_text(
        json.dumps({"domain": [[-1.25, -0.25], [0.25, 1.25]], "h": 1 / 32, "s": 0.5, "beta": 0.125, "restarts": 10})
    )
    assert main(["twoball", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    conc = json.loads((tmp_path / "out" / "result.json").read_text())["concentration"]
    assert conc["energy"] == rep.energy
    record(
        10,
        "two-component concentration (exploratory)",
        True,
        f"fractions {rep.fractions}, J(u_hat)={rep.J_hat:.6g}, J(copy)={rep.J_copy:.6g}"
        + ("" if ok else "  [WARNING: heuristic not observed]"),
    )


# ------------------------------------------------------------------ 11


@pytest.mark.parametrize("command", ["maximize", "brute"])
def test_11_determinism(tmp_path, command):
    cfg = {"domain": [[-1, -0.25], [0.25, 1]], "h": 1 / 16, "beta": 0.3125, "s": 0.45, "restarts": 8, "seed": 11}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    texts = []
    for i, threads in enumerate((1, 1, 2, 4)):
        out = tmp_path / f"run{i}"
        assert main([command, "--config", str(path), "--out", str(out), "--threads", str(threads)]) == 0
        text = (out / "result.json").read_text()
        texts.append(text[: text.index('"metadata"')])
    same = all(t == texts[0] for t in texts)
    record(11, f"determinism ({command})", same, "4 runs, threads 1/1/2/4, result.json identical before metadata")
    assert same
