"""Timing comparison of the half-sweep row solvers.

Runs the compiled and pure-Python kernels on the same synthetic
problem, checks they agree, and reports per-sweep wall time, including
the threaded fan-out of the compiled kernel.

    python benchmarks/bench_half_sweep.py --users 2000 --items 3000 --d 64
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dotrank.ials import _solve_py
from dotrank.ials.backend import solve_side
from dotrank.synthetic import zipf_interactions

try:
    from dotrank.ials import _solve_c
except ImportError:
    _solve_c = None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--users", type=int, default=1000)
    ap.add_argument("--items", type=int, default=2000)
    ap.add_argument("--d", type=int, default=32)
    ap.add_argument("--per-user", type=int, nargs=2, default=(20, 60))
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    x = zipf_interactions(
        args.users, args.items, per_user=tuple(args.per_user), seed=args.seed
    )
    indptr, indices = x.to_csr(side="users")
    rng = np.random.default_rng(args.seed)
    other = rng.normal(0.0, 0.1, size=(args.items, args.d))
    gram = other.T @ other
    nu = (x.user_counts + 0.1 * args.items).astype(np.float64)
    alpha0, reg = 0.1, 0.01
    n_rows = args.users

    def run_py():
        out = np.empty((n_rows, args.d))
        _solve_py.solve_rows(gram, other, indptr, indices, alpha0, reg, nu, out, 0, n_rows)
        return out

    t_py, ref = _time(run_py, args.repeats)
    rows = [("python", 1, t_py, 1.0)]

    if _solve_c is not None:

        def run_c():
            out = np.empty((n_rows, args.d))
            _solve_c.solve_rows(
                gram, other, indptr, indices, alpha0, reg, nu, out, 0, n_rows
            )
            return out

        t_c, out_c = _time(run_c, args.repeats)
        assert np.allclose(out_c, ref, rtol=1e-9, atol=1e-12)
        rows.append(("compiled", 1, t_c, t_py / t_c))

        def run_threaded():
            return solve_side(
                gram, other, indptr, indices, alpha0, reg, nu, threads=args.threads
            )

        t_t, out_t = _time(run_threaded, args.repeats)
        assert np.array_equal(out_t, out_c)
        rows.append(("compiled", args.threads, t_t, t_py / t_t))
    else:
        print("compiled kernel not available; timing the reference only")

    print(f"{args.users} users x {args.items} items, d={args.d}, nnz={len(x.pairs)}")
    print(f"{'backend':<10} {'threads':>7} {'seconds':>10} {'speedup':>8}")
    for name, threads, sec, speed in rows:
        print(f"{name:<10} {threads:>7} {sec:>10.4f} {speed:>7.1f}x")


if __name__ == "__main__":
    main()
