"""Benchmark the hot kernels on both backends (numba @njit vs pure numpy).

Usage:
    python benchmarks/bench_kernels.py [--repeats N]

Times the Walsh-character exponent table (the inner loop of every grid
sweep) and the carry-free analysis/synthesis transforms at sizes well above
the desk-scale defaults, then prints a comparison table.  Run under
FRAMEFIELD_BACKEND=numpy to confirm the fallback alone still works.
"""

import argparse
import time

import numpy as np

from framefield import kernels
from framefield.galois import FieldParams
from framefield.mask import _tmod
from framefield.verify import _upsample_indices


def timeit(fn, repeats):
    fn()  # warm-up (JIT compilation, caches)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_exponent_table(repeats):
    cases = []
    for q, depth, support in [(2, 12, 64), (3, 8, 81), (5, 6, 125)]:
        params = FieldParams(q, 1)
        tmod = _tmod(params)
        a = np.stack([(np.arange(support) // q ** d) % q for d in range(depth)], axis=1)
        g = np.stack([(np.arange(q ** depth) // q ** d) % q for d in range(depth)], axis=1)
        row = {"kernel": f"exponent_table q={q} ({support}x{q ** depth})"}
        row["numpy"] = timeit(lambda: kernels.exponent_table_numpy(a, g, tmod, q), repeats)
        if kernels.exponent_table_numba is not None:
            row["numba"] = timeit(lambda: kernels.exponent_table_numba(a, g, tmod, q), repeats)
        cases.append(row)
    return cases


def bench_transforms(repeats):
    params = FieldParams(2, 1)
    rng = np.random.default_rng(0)
    rows = []
    # the small case is the regime the experiments actually run in; the large
    # one shows where BLAS-backed numpy takes over from the jitted loops
    for exponent, inner in [(6, 2000), (14, 1)]:
        n = 2 ** exponent
        coeffs = rng.standard_normal((4, 8)) + 1j * rng.standard_normal((4, 8))
        signal = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        idx = _upsample_indices(params, exponent, coeffs.shape[1])
        branches = rng.standard_normal((4, n // 2)) + 1j * rng.standard_normal((4, n // 2))

        def loop(fn, *args):
            def run():
                for _ in range(inner):
                    fn(*args)

            return run

        row = {"kernel": f"analysis 2**{exponent} (x{inner})"}
        row["numpy"] = timeit(loop(kernels.analysis_apply_numpy, coeffs, signal, idx), repeats)
        if kernels.analysis_apply_numba is not None:
            row["numba"] = timeit(loop(kernels.analysis_apply_numba, coeffs, signal, idx), repeats)
        rows.append(row)
        row = {"kernel": f"synthesis 2**{exponent} (x{inner})"}
        row["numpy"] = timeit(loop(kernels.synthesis_apply_numpy, coeffs, branches, idx, n), repeats)
        if kernels.synthesis_apply_numba is not None:
            row["numba"] = timeit(
                loop(kernels.synthesis_apply_numba, coeffs, branches, idx, n), repeats
            )
        rows.append(row)
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    rows = bench_exponent_table(args.repeats) + bench_transforms(args.repeats)
    width = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for row in rows:
        np_ms = row["numpy"] * 1e3
        if "numba" in row:
            nb_ms = row["numba"] * 1e3
            print(f"{row['kernel']:<{width}}  {np_ms:>8.3f}ms  {nb_ms:>8.3f}ms  {np_ms / nb_ms:>7.1f}x")
        else:
            print(f"{row['kernel']:<{width}}  {np_ms:>8.3f}ms  {'n/a':>10}  {'':>8}")


if __name__ == "__main__":
    main()
