"""Row-solver backend selection and the threaded driver.

The compiled extension is used when importable; set DOTRANK_PURE_PYTHON=1
to force the reference implementation. Both backends share the contract
of ``_solve_py.solve_rows``, and per-row results are independent of how
rows are sliced across threads, so threading never changes the output
bits for a given backend.
"""

from __future__ import annotations

import os
import threading

import numpy as np

if os.environ.get("DOTRANK_PURE_PYTHON"):
    from ._solve_py import solve_rows

    BACKEND = "python"
else:
    try:
        from ._solve_c import solve_rows

        BACKEND = "compiled"
    except ImportError:
        from ._solve_py import solve_rows

        BACKEND = "python"

__all__ = ["BACKEND", "solve_rows", "solve_side"]


def solve_side(gram, other, indptr, indices, alpha0, reg, nu, threads=1):
    """Solve every row's normal equations, fanning out across threads.

    Only the compiled backend actually benefits from threads (it drops
    the GIL); the reference backend runs the single-slice path.
    """
    gram = np.ascontiguousarray(gram, dtype=np.float64)
    other = np.ascontiguousarray(other, dtype=np.float64)
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    nu = np.ascontiguousarray(nu, dtype=np.float64)
    n_rows = indptr.shape[0] - 1
    out = np.empty((n_rows, other.shape[1]), dtype=np.float64)

    threads = max(1, int(threads))
    if threads == 1 or BACKEND != "compiled" or n_rows < 2 * threads:
        solve_rows(gram, other, indptr, indices, alpha0, reg, nu, out, 0, n_rows)
        return out

    failures = []

    def run(lo, hi):
        try:
            solve_rows(gram, other, indptr, indices, alpha0, reg, nu, out, lo, hi)
        except Exception as exc:  # re-raised on the calling thread
            failures.append(exc)

    cuts = np.linspace(0, n_rows, threads + 1).astype(int)
    workers = [
        threading.Thread(target=run, args=(lo, hi))
        for lo, hi in zip(cuts[:-1], cuts[1:])
        if lo < hi
    ]
    for w in workers:
        w.start()
    for w in workers:
        w.join()
    if failures:
        raise failures[0]
    return out
