# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: exact Gini split scan and gradient histogram build.

Signatures mirror sdnguard._kernels._fallback exactly; the package selects
whichever is importable.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def gini_split_scan(double[::1] x_sorted, long[::1] y_sorted, int n_classes,
                    int min_leaf):
    """Best binary split of a column pre-sorted ascending.

    Returns (pos, score): split puts the first `pos` rows left; score is
    sum(left_counts^2)/n_left + sum(right_counts^2)/n_right, to be maximized.
    pos == -1 means no admissible split (all values equal or min_leaf binds).
    """
    cdef Py_ssize_t n = x_sorted.shape[0]
    cdef cnp.ndarray[double, ndim=1] left_buf = np.zeros(n_classes)
    cdef cnp.ndarray[double, ndim=1] total_buf = np.zeros(n_classes)
    cdef double[::1] left = left_buf
    cdef double[::1] total = total_buf
    cdef Py_ssize_t i, p
    cdef int c
    cdef double sq_left, sq_right, score, best_score
    cdef Py_ssize_t best_pos = -1

    for i in range(n):
        total[y_sorted[i]] += 1.0
    best_score = -1.0
    for p in range(1, n):
        left[y_sorted[p - 1]] += 1.0
        if p < min_leaf or n - p < min_leaf:
            continue
        if x_sorted[p - 1] >= x_sorted[p]:
            continue
        sq_left = 0.0
        sq_right = 0.0
        for c in range(n_classes):
            sq_left += left[c] * left[c]
            sq_right += (total[c] - left[c]) * (total[c] - left[c])
        score = sq_left / p + sq_right / (n - p)
        if score > best_score:
            best_score = score
            best_pos = p
    return best_pos, best_score


def hist_build(int[::1] codes, int[::1] rows, double[::1] grad,
               double[::1] hess, int n_bins):
    """Accumulate per-bin gradient/hessian sums and row counts."""
    cdef cnp.ndarray[double, ndim=1] g_buf = np.zeros(n_bins)
    cdef cnp.ndarray[double, ndim=1] h_buf = np.zeros(n_bins)
    cdef cnp.ndarray[long, ndim=1] c_buf = np.zeros(n_bins, dtype=np.int64)
    cdef double[::1] g = g_buf
    cdef double[::1] h = h_buf
    cdef long[::1] c = c_buf
    cdef Py_ssize_t i, r
    cdef int b
    for i in range(rows.shape[0]):
        r = rows[i]
        b = codes[r]
        g[b] += grad[r]
        h[b] += hess[r]
        c[b] += 1
    return g_buf, h_buf, c_buf
