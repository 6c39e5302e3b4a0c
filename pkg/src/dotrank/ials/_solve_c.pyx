# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled row solver for the alternating least-squares half-sweep.

Same contract as the pure-Python reference: per row r, solve

    (alpha0 * G + (1 - alpha0) * B^T B + reg * nu_r * I) x = B^T 1

with B the factors of the row's interacted columns. B is gathered into
a scratch block, its Gramian accumulated with one dsyrk per row, and
the system solved in place with dposv; the normal matrix is symmetric
positive definite whenever the row has interactions, because it
rewrites as B^T B + alpha0 * (G - B^T B) plus a positive ridge. Empty
rows short-circuit to zero.

The whole loop runs without the GIL so callers can fan rows out across
threads; each call owns its scratch buffers.
"""

import numpy as np

from libc.stdint cimport int64_t
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport dsyrk
from scipy.linalg.cython_lapack cimport dposv

from ..errors import NumericError


def solve_rows(const double[:, ::1] gram, const double[:, ::1] other,
               const int64_t[::1] indptr, const int64_t[::1] indices,
               double alpha0, double reg, const double[::1] nu,
               double[:, ::1] out, Py_ssize_t start, Py_ssize_t end):
    """Solve rows [start, end) into ``out`` (shared, disjoint slices)."""
    cdef Py_ssize_t d = other.shape[1]
    cdef Py_ssize_t max_len = 0, r, lo, hi
    for r in range(start, end):
        if indptr[r + 1] - indptr[r] > max_len:
            max_len = indptr[r + 1] - indptr[r]

    a_buf = np.empty((d, d), dtype=np.float64)
    rhs_buf = np.empty(d, dtype=np.float64)
    block_buf = np.empty((max(max_len, 1), d), dtype=np.float64)
    cdef double[:, ::1] a = a_buf
    cdef double[::1] rhs = rhs_buf
    cdef double[:, ::1] block = block_buf
    cdef Py_ssize_t i, j, k, col, n_obs
    cdef double w = 1.0 - alpha0
    cdef double diag, one = 1.0
    cdef char uplo = b'U'
    cdef char no_trans = b'N'
    cdef int n = <int> d, nrhs = 1, kk, info = 0
    cdef Py_ssize_t bad_row = -1

    with nogil:
        for r in range(start, end):
            lo = indptr[r]
            hi = indptr[r + 1]
            if lo == hi:
                for i in range(d):
                    out[r, i] = 0.0
                continue
            n_obs = hi - lo
            for k in range(n_obs):
                col = indices[lo + k]
                memcpy(&block[k, 0], &other[col, 0], d * sizeof(double))
            for i in range(d):
                rhs[i] = 0.0
                for j in range(d):
                    a[i, j] = alpha0 * gram[i, j]
            for k in range(n_obs):
                for i in range(d):
                    rhs[i] += block[k, i]
            # Row-major block reads column-major as B^T (d x n_obs), so
            # trans='N' accumulates w * B^T B onto A's chosen triangle;
            # dposv below reads the same triangle.
            kk = <int> n_obs
            dsyrk(&uplo, &no_trans, &n, &kk, &w, &block[0, 0], &n,
                  &one, &a[0, 0], &n)
            diag = reg * nu[r]
            for i in range(d):
                a[i, i] += diag
            dposv(&uplo, &n, &nrhs, &a[0, 0], &n, &rhs[0], &n, &info)
            if info != 0:
                bad_row = r
                break
            for i in range(d):
                out[r, i] = rhs[i]

    if bad_row >= 0:
        raise NumericError(f"singular normal equations at row {bad_row}")
