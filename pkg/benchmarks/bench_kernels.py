"""Benchmark the compiled kernels against the pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--sizes 200,1000,4000] [--repeat 5]

Both implementations are always importable, so this script times them head to
head in a single process regardless of the SHARPMIN_FORCE_NUMPY setting.
"""

import argparse
import time

import numpy as np

from sharpmin import kernels


def time_call(fn, *args, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_case(n, d, repeat, rng):
    points = rng.uniform(-5, 5, size=(n, d))
    values = rng.uniform(0, 10, size=n)
    base = int(np.argmin(values))
    dual = rng.uniform(-3, 3, size=(n, d))

    rows = []
    cases = [
        ("min_growth_ratio", kernels.min_growth_ratio_numpy, (points, values, base)),
        ("slope_table", kernels.slope_table_numpy, (points, values)),
        ("conjugate_brute", kernels.conjugate_brute_numpy, (points, values, dual)),
    ]
    conj = kernels.conjugate_brute_numpy(points, values, dual)
    cases.append(
        ("fy_violation", kernels.fy_violation_numpy, (points, values, dual, conj))
    )
    for name, numpy_fn, args in cases:
        t_np = time_call(numpy_fn, *args, repeat=repeat)
        if kernels.NUMBA_ENABLED:
            numba_fn = getattr(kernels, f"{name}_numba")
            numba_fn(*args)  # warm the JIT outside the timed region
            t_nb = time_call(numba_fn, *args, repeat=repeat)
        else:
            t_nb = None
        rows.append((name, n, d, t_np, t_nb))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="200,1000,4000")
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"numba available: {kernels.NUMBA_ENABLED}")
    header = f"{'kernel':<18} {'n':>6} {'d':>2} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in (int(s) for s in args.sizes.split(",")):
        for name, size, d, t_np, t_nb in bench_case(n, args.dim, args.repeat, rng):
            if t_nb is None:
                print(f"{name:<18} {size:>6} {d:>2} {t_np * 1e3:>12.3f} {'-':>12} {'-':>8}")
            else:
                print(
                    f"{name:<18} {size:>6} {d:>2} {t_np * 1e3:>12.3f}"
                    f" {t_nb * 1e3:>12.3f} {t_np / t_nb:>7.2f}x"
                )


if __name__ == "__main__":
    main()
