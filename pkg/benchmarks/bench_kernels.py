"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs once untimed so numba compilation is excluded.
"""

import argparse
import time
from math import comb

import numpy as np

from fracrearr import assemble, build_grid, kernels
from fracrearr.maximizer import green_matrix
from fracrearr.operator import kernel_weight


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_fill(n, repeat):
    grid = build_grid([(0, 1), (1.5, 2.5)], 2 / n)
    idx = grid.lattice
    span = int(idx[-1] - idx[0]) + 1
    w = np.zeros(span)
    w[1:] = kernel_weight(np.arange(1, span), grid.h, 0.5)
    return {
        name: best_of(lambda f=f: f(idx, w, 1.0), repeat)
        for name, f in (("numba", kernels.fill_operator_numba), ("numpy", kernels.fill_operator_numpy))
    }


def bench_scan(n, k, repeat):
    g = green_matrix(assemble(build_grid([(0, 1)], 1 / n), 0.5))
    first = kernels.combination_unrank(0, n, k)
    total = comb(n, k)
    return {
        name: best_of(lambda f=f: f(g, first, total, np.inf), repeat)
        for name, f in (("numba", kernels.subset_scan_numba), ("numpy", kernels.subset_scan_numpy))
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    rows = []
    for n in (512, 2048):
        rows.append((f"fill_operator n={n}", bench_fill(n, args.repeat)))
    for n, k in ((20, 5), (24, 7)):
        rows.append((f"subset_scan C({n},{k})={comb(n, k)}", bench_scan(n, k, args.repeat)))
    print(f"{'kernel':<34}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, t in rows:
        print(f"{name:<34}{t['numba']:>12.4f}{t['numpy']:>12.4f}{t['numpy'] / t['numba']:>10.1f}")


if __name__ == "__main__":
    main()
