"""Benchmark the compiled elimination kernel against the numpy fallback.

Row reduction over F_p is the hot loop of every field-mode Hom computation
(tower stages and the oracle both live on it).  Both implementations are
imported directly, so the comparison runs regardless of which one the
package selected at import.

Usage: python benchmarks/bench_kernels.py [--sizes 50,100,200,400] [--p 251]
"""

import argparse
import time

import numpy as np

from conetower import _modp_py

try:
    from conetower import _modp_c
except ImportError:
    _modp_c = None


def bench(impl, M, p, reps=3):
    best = float("inf")
    pivots = None
    for _ in range(reps):
        A = np.ascontiguousarray(M.copy())
        t0 = time.perf_counter()
        pivots = impl.rref_inplace(A, p)
        best = min(best, time.perf_counter() - t0)
    return best, A, list(pivots)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="50,100,200,400")
    ap.add_argument("--p", type=int, default=251)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    if _modp_c is None:
        print("compiled kernel not built; timing the fallback only")
    header = f"{'n':>6} {'pure (s)':>12} {'compiled (s)':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        M = rng.integers(0, args.p, (n, n), dtype=np.int64)
        tp, Ap, pp = bench(_modp_py, M, args.p, args.reps)
        if _modp_c is not None:
            tc, Ac, pc = bench(_modp_c, M, args.p, args.reps)
            assert pp == pc and np.array_equal(Ap, Ac), "implementations disagree"
            print(f"{n:>6} {tp:>12.4f} {tc:>14.4f} {tp / tc:>8.1f}x")
        else:
            print(f"{n:>6} {tp:>12.4f} {'-':>14} {'-':>9}")


if __name__ == "__main__":
    main()
