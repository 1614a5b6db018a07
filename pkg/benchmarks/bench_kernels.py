"""Benchmark the compiled aggregation kernels against the numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--replicates N]

Times the fused top-k weighted-sum kernel on a grid of (n, k) shapes and an
end-to-end crude tail estimate, printing one table row per case with the
compiled/python speedup.  Both backends produce bit-identical results; that
is asserted on every timed case.
"""

import argparse
import time

import numpy as np

from ordertail import Pareto, Scenario, Uniform, WeightVectorSpec, crude
from ordertail import _core_py

try:
    from ordertail import _core
except ImportError:
    _core = None


def _time(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def bench_kernels(replicates):
    print(f"fused weighted top-k kernel, {replicates:,} replicates")
    print(f"{'n':>4} {'k':>4} {'python':>10} {'compiled':>10} {'speedup':>8}")
    rng = np.random.default_rng(0)
    for n, k in ((5, 3), (20, 5), (50, 10), (100, 10)):
        x = rng.random((replicates, n)) * 10.0
        c = rng.random((replicates, k))
        t_py, out_py = _time(_core_py.weighted_topk_sums, x, c)
        if _core is None:
            print(f"{n:>4} {k:>4} {t_py * 1e3:>9.1f}ms {'--':>10} {'--':>8}")
            continue
        t_cy, out_cy = _time(_core.weighted_topk_sums, x, c)
        assert np.array_equal(out_py, out_cy), "backends diverged"
        print(f"{n:>4} {k:>4} {t_py * 1e3:>9.1f}ms {t_cy * 1e3:>8.1f}ms "
              f"{t_py / t_cy:>7.2f}x")


def bench_end_to_end(replicates):
    import os

    scenario = Scenario(n=5, k=3, marginals=(Pareto(2.0, 1.0),) * 5,
                        corr=None,
                        weights=WeightVectorSpec((Uniform(1.0),) * 3))
    print(f"\nend-to-end crude estimate, n=5, k=3, {replicates:,} replicates, "
          f"backend={'compiled' if _core is not None else 'python'}")
    start = time.perf_counter()
    est = crude(scenario, 30.0, replicates, seed=0,
                workers=os.cpu_count() or 1)
    elapsed = time.perf_counter() - start
    print(f"point={est.point:.3e}  {elapsed:.2f}s "
          f"({replicates / elapsed / 1e6:.1f}M replicates/s)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replicates", type=int, default=1_000_000)
    args = parser.parse_args()
    if _core is None:
        print("note: compiled extension not importable; timing fallback only")
    bench_kernels(args.replicates)
    bench_end_to_end(args.replicates)


if __name__ == "__main__":
    main()
