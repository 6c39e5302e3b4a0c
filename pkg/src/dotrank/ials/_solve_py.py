"""Reference row solver for the alternating least-squares half-sweep.

One normal-equation solve per row: with the other side's factors fixed,
the minimizer of the loss restricted to row r is

    (alpha0 * G + (1 - alpha0) * B^T B + reg * nu_r * I)^{-1} B^T 1

where B stacks the factors of the row's interacted columns and
G = other^T other. The (1 - alpha0) factor removes the observed pairs'
share of the all-pairs Gramian term, so observed pairs keep unit weight
while every unobserved pair is weighted alpha0.

Rows with no interactions short-circuit to zero: their loss restricted
to the row is a positive-semidefinite form minimized at the origin,
and skipping the solve keeps the alpha0 = 0 corner (where the system
degenerates) exact.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericError


def solve_rows(gram, other, indptr, indices, alpha0, reg, nu, out, start, end):
    """Solve rows [start, end) into ``out``.

    gram is other^T @ other, precomputed once per half-sweep. indptr and
    indices give each row's interacted column ids in ascending order,
    which fixes the summation order and makes reruns bit-identical.
    """
    d = other.shape[1]
    eye = np.eye(d)
    for r in range(start, end):
        lo, hi = indptr[r], indptr[r + 1]
        if lo == hi:
            out[r, :] = 0.0
            continue
        block = other[indices[lo:hi], :]
        a = alpha0 * gram + (1.0 - alpha0) * (block.T @ block)
        a += (reg * nu[r]) * eye
        rhs = block.sum(axis=0)
        try:
            out[r, :] = np.linalg.solve(a, rhs)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"singular normal equations at row {r}") from exc
