"""Compare the numba-compiled scoring kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [n_products] [repeats]
"""

import sys
import time

import numpy as np

from prefsearch import _kernels


def _time(fn, *args, repeats=5):
    fn(*args)  # warm-up (includes JIT compilation)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 5
    rng = np.random.default_rng(0)
    distances = rng.uniform(0, 10, n)
    values = rng.uniform(0, 400, n)
    anchors = np.array([1.0, 0.75, 0.7, 0.5, 0.45, 0.25])
    lats = rng.uniform(52.3, 52.7, n)
    lons = rng.uniform(13.1, 13.6, n)
    matrix = rng.uniform(0, 1, (8, n // 100))
    weights = rng.uniform(0, 1, 8)

    cases = [
        ("gaussian_rs", (distances, 1.2, 0.4, 3.0)),
        ("linear_directed_rs", (values, 0.0, 400.0, True)),
        ("trilinear_rs", (values, 60.0, 120.0, 0.2, anchors)),
        ("haversine_km", (52.52, 13.405, lats, lons)),
        ("weighted_sum", (matrix, weights)),
    ]

    try:
        from numba import njit
        compiled = {name: njit(cache=True)(getattr(_kernels, f"_{name}")) for name, _ in cases}
    except ImportError:
        compiled = None
        print("numba not available; benchmarking numpy fallback only")

    print(f"n = {n}, best of {repeats} runs")
    header = f"{'kernel':<20} {'numpy (s)':>12}" + (f" {'numba (s)':>12} {'speedup':>9}" if compiled else "")
    print(header)
    for name, args in cases:
        plain = _time(getattr(_kernels, f"_{name}"), *args, repeats=repeats)
        line = f"{name:<20} {plain:>12.6f}"
        if compiled:
            fast = _time(compiled[name], *args, repeats=repeats)
            line += f" {fast:>12.6f} {plain / fast:>8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
