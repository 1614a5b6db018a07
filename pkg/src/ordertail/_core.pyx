# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the per-replicate aggregation loop.

Each routine mirrors the numpy fallback in _core_py bit for bit: the k
largest entries of a row are selected in descending order and the weighted
sum is accumulated left to right in float64.  Keep both files in sync.
"""

from libc.stdlib cimport free, malloc

import numpy as np

BACKEND = "compiled"


cdef inline void _select_topk(const double* row, double* buf,
                              Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    # Partial selection sort: buf[0..k) ends up holding the k largest
    # values of row in descending order.  O(n*k), fine for n <= ~100.
    cdef Py_ssize_t i, j, arg
    cdef double best, tmp
    for i in range(n):
        buf[i] = row[i]
    for j in range(k):
        arg = j
        best = buf[j]
        for i in range(j + 1, n):
            if buf[i] > best:
                best = buf[i]
                arg = i
        if arg != j:
            tmp = buf[j]
            buf[j] = buf[arg]
            buf[arg] = tmp


def topk_desc(x, Py_ssize_t k):
    """Per-row k largest entries of ``x`` in descending order."""
    cdef const double[:, :] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n_rows = xv.shape[0]
    cdef Py_ssize_t n = xv.shape[1]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    out_arr = np.empty((n_rows, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double* buf = <double*> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    try:
        with nogil:
            for i in range(n_rows):
                _select_topk(&xv[i, 0], buf, n, k)
                for j in range(k):
                    out[i, j] = buf[j]
    finally:
        free(buf)
    return out_arr


def weighted_sums(xs, c):
    """Row-wise weighted sums sum_j c[i, j] * xs[i, j], accumulated left to right."""
    cdef const double[:, :] xv = np.asarray(xs, dtype=np.float64)
    cdef const double[:, :] cv = np.asarray(c, dtype=np.float64)
    if xv.shape[0] != cv.shape[0] or xv.shape[1] != cv.shape[1]:
        raise ValueError("xs and c must be 2-d arrays of identical shape")
    cdef Py_ssize_t n_rows = xv.shape[0]
    cdef Py_ssize_t k = xv.shape[1]
    out_arr = np.empty(n_rows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double acc
    with nogil:
        for i in range(n_rows):
            acc = xv[i, 0] * cv[i, 0]
            for j in range(1, k):
                acc = acc + xv[i, j] * cv[i, j]
            out[i] = acc
    return out_arr


def weighted_topk_sums(x, c):
    """Fused kernel: weighted sum of the k largest entries per row."""
    cdef const double[:, :] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:, :] cv = np.asarray(c, dtype=np.float64)
    cdef Py_ssize_t n_rows = xv.shape[0]
    cdef Py_ssize_t n = xv.shape[1]
    cdef Py_ssize_t k = cv.shape[1]
    if cv.shape[0] != n_rows:
        raise ValueError("x and c must have the same number of rows")
    if not 1 <= k <= n:
        raise ValueError(f"c has {k} columns; expected between 1 and {n}")
    out_arr = np.empty(n_rows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double* buf = <double*> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef double acc
    try:
        with nogil:
            for i in range(n_rows):
                _select_topk(&xv[i, 0], buf, n, k)
                acc = buf[0] * cv[i, 0]
                for j in range(1, k):
                    acc = acc + buf[j] * cv[i, j]
                out[i] = acc
    finally:
        free(buf)
    return out_arr
