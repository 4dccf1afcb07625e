"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--blocks N] [--repeat R]

Both backends are imported directly, so the environment switch is not
needed. Results are checked for agreement before any timing is printed.
"""

import argparse
import time

import numpy as np

from bcnoma import _fallback

try:
    from bcnoma import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--blocks", type=int, default=1 << 20)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid", type=int, default=400, help="oracle points per dimension")
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")

    rng = np.random.default_rng(0)
    gA = rng.exponential(1.0, args.blocks)
    gB = rng.exponential(0.5, args.blocks)
    gz = rng.exponential(0.25, args.blocks)
    consts = (1.0, 1.0, 1.0, 2 ** 0.5 - 1)

    for a, b in zip(_kernels.min_power_batch(gA, gB, gz, *consts),
                    _fallback.min_power_batch(gA, gB, gz, *consts)):
        np.testing.assert_allclose(a, b, rtol=1e-13)

    cases = [
        ("min_power_batch", lambda m: m.min_power_batch(gA, gB, gz, *consts)),
        ("oracle_nc", lambda m: m.oracle_nc(2.0, 0.5, 1.0, 1.0, 1.0, 1.0, 3.0, 20 * args.grid, 2)),
        ("oracle_cr", lambda m: m.oracle_cr(2.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, args.grid, 2)),
        ("oracle_bc", lambda m: m.oracle_bc(2.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 20 * args.grid, 2,
                                            1.0 - 1e-9)),
    ]
    print(f"{'kernel':<18}{'cython [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, call in cases:
        tc = best_of(lambda: call(_kernels), args.repeat)
        tp = best_of(lambda: call(_fallback), args.repeat)
        print(f"{name:<18}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
