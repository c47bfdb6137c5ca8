"""Hot numeric loops, each in a numba and a pure-numpy flavour.

The public names (``fill_operator``, ``subset_scan``) dispatch on
:data:`fracrearr._accel.USE_NUMBA`.  Both flavours stay importable under the
``*_numba`` / ``*_numpy`` names so tests and the benchmark can compare them.
"""

from __future__ import annotations

from itertools import combinations, islice

import numpy as np

from ._accel import USE_NUMBA, njit

_BATCH = 1 << 15


# --------------------------------------------------------------------------
# operator fill: A[i, i] = diag, A[i, j] = -weights[|idx_i - idx_j|]
# --------------------------------------------------------------------------


def fill_operator_numpy(idx: np.ndarray, weights: np.ndarray, diag: float) -> np.ndarray:
    dist = np.abs(idx[:, None] - idx[None, :])
    a = -weights[dist]
    np.fill_diagonal(a, diag)
    return a


@njit(cache=True, nogil=True)
def fill_operator_numba(idx, weights, diag):
    n = idx.shape[0]
    a = np.empty((n, n))
    for i in range(n):
        mi = idx[i]
        for j in range(n):
            d = mi - idx[j]
            if d < 0:
                d = -d
            a[i, j] = -weights[d]
        a[i, i] = diag
    return a


# --------------------------------------------------------------------------
# k-subset scan over a Gram-type matrix G: value(c) = sum_{a,b in c} G[a, b]
#
# Scans `count` subsets in lexicographic order starting at `first`.  Returns
# the maximum value seen and the offset of the first subset whose value is
# >= threshold (-1 if none).  A finite threshold stops the scan at the hit.
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def subset_scan_numba(g, first, count, threshold):
    n = g.shape[0]
    k = first.shape[0]
    c = first.copy()
    best = -np.inf
    for off in range(count):
        v = 0.0
        for a in range(k):
            row = c[a]
            for b in range(k):
                v += g[row, c[b]]
        if v > best:
            best = v
        if v >= threshold:
            return best, off
        # advance to the next combination
        i = k - 1
        while i >= 0 and c[i] == n - k + i:
            i -= 1
        if i < 0:
            break
        c[i] += 1
        for j in range(i + 1, k):
            c[j] = c[j - 1] + 1
    return best, -1


def subset_scan_numpy(g, first, count, threshold):
    n = g.shape[0]
    k = first.shape[0]
    start = combination_rank(first, n)
    it = islice(combinations(range(n), k), start, start + count)
    best = -np.inf
    off = 0
    while True:
        block = np.fromiter(islice(it, _BATCH), dtype=np.dtype((np.int64, k)))
        if block.shape[0] == 0:
            break
        vals = g[block[:, :, None], block[:, None, :]].sum(axis=(1, 2))
        hits = np.flatnonzero(vals >= threshold)
        if hits.size:
            best = max(best, float(vals[: hits[0] + 1].max()))
            return best, off + int(hits[0])
        best = max(best, float(vals.max()))
        off += block.shape[0]
    return best, -1


# --------------------------------------------------------------------------
# combinatorial helpers (pure python integers; not hot)
# --------------------------------------------------------------------------


def combination_unrank(rank: int, n: int, k: int) -> np.ndarray:
    """k-subset of range(n) at position `rank` in lexicographic order."""
    from math import comb

    out = np.empty(k, dtype=np.int64)
    x = 0
    for i in range(k):
        while True:
            c = comb(n - x - 1, k - i - 1)
            if rank < c:
                break
            rank -= c
            x += 1
        out[i] = x
        x += 1
    return out


def combination_rank(subset, n: int) -> int:
    from math import comb

    k = len(subset)
    rank = 0
    prev = -1
    for i, x in enumerate(subset):
        for y in range(prev + 1, int(x)):
            rank += comb(n - y - 1, k - i - 1)
        prev = int(x)
    return rank


if USE_NUMBA:
    fill_operator = fill_operator_numba
    subset_scan = subset_scan_numba
else:
    fill_operator = fill_operator_numpy
    subset_scan = subset_scan_numpy
