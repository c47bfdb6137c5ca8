from itertools import combinations
from math import comb

import numpy as np
import pytest

from fracrearr import kernels
from fracrearr._accel import backend_name


@pytest.mark.parametrize("n, k", [(1, 1), (5, 2), (8, 8), (9, 4)])
def test_rank_unrank_roundtrip(n, k):
    for r, c in enumerate(combinations(range(n), k)):
        assert tuple(kernels.combination_unrank(r, n, k)) == c
        assert kernels.combination_rank(c, n) == r


def _reference_scan(g, k):
    vals = [g[np.ix_(c, c)].sum() for c in combinations(range(g.shape[0]), k)]
    return np.array(vals)


@pytest.mark.parametrize("scan", [kernels.subset_scan_numba, kernels.subset_scan_numpy])
def test_subset_scan_max(scan, rng):
    n, k = 11, 4
    g = rng.standard_normal((n, n))
    g = g + g.T
    ref = _reference_scan(g, k)
    best, off = scan(g, kernels.combination_unrank(0, n, k), comb(n, k), np.inf)
    assert off == -1
    assert best == pytest.approx(ref.max(), rel=1e-13)


@pytest.mark.parametrize("scan", [kernels.subset_scan_numba, kernels.subset_scan_numpy])
def test_subset_scan_threshold_hit(scan, rng):
    n, k = 10, 3
    g = rng.random((n, n))
    g = g + g.T
    ref = _reference_scan(g, k)
    cut = np.sort(ref)[-5]
    lo = 7
    _, off = scan(g, kernels.combination_unrank(lo, n, k), comb(n, k) - lo, cut)
    assert lo + off == lo + int(np.flatnonzero(ref[lo:] >= cut)[0])


def test_subset_scan_chunks_cover_everything(rng):
    n, k = 12, 5
    g = rng.random((n, n))
    g = g + g.T
    total = comb(n, k)
    step = 97
    best = max(
        kernels.subset_scan(g, kernels.combination_unrank(lo, n, k), min(step, total - lo), np.inf)[0]
        for lo in range(0, total, step)
    )
    assert best == pytest.approx(_reference_scan(g, k).max(), rel=1e-13)


def test_backend_name():
    assert backend_name() in ("numba", "numpy")


_PROBE = """
import fracrearr as fr
op = fr.assemble(fr.build_grid([(0, 1), (1.25, 2)], 1 / 8), 0.45)
r = fr.brute_force(op, 4)
print(fr.backend_name(), list(r.selected), repr(r.energy))
"""


def _probe(flag):
    import os
    import subprocess
    import sys

    env = dict(os.environ, FRACREARR_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", _PROBE], env=env, capture_output=True, text=True, check=True)
    name, rest = out.stdout.split(" ", 1)
    return name, rest


def test_env_flag_selects_backend():
    fast, res_fast = _probe("0")
    slow, res_slow = _probe("1")
    assert slow == "numpy"
    assert fast in ("numba", "numpy")
    assert res_fast == res_slow
