"""Pure-numpy implementations of the hot kernels.

Used when the compiled extension is unavailable; same signatures and
semantics as sdnguard._kernels._core.
"""

import numpy as np


def gini_split_scan(x_sorted, y_sorted, n_classes, min_leaf):
    n = x_sorted.shape[0]
    if n < 2:
        return -1, -1.0
    onehot = y_sorted[:, None] == np.arange(n_classes)[None, :]
    left = np.cumsum(onehot, axis=0, dtype=np.float64)[:-1]  # counts at pos 1..n-1
    total = left[-1] + onehot[-1]
    pos = np.arange(1, n, dtype=np.float64)
    valid = (x_sorted[:-1] < x_sorted[1:]) & (pos >= min_leaf) & (n - pos >= min_leaf)
    if not valid.any():
        return -1, -1.0
    right = total[None, :] - left
    score = (left * left).sum(axis=1) / pos + (right * right).sum(axis=1) / (n - pos)
    score[~valid] = -np.inf
    best = int(np.argmax(score))
    return best + 1, float(score[best])


def hist_build(codes, rows, grad, hess, n_bins):
    b = codes[rows]
    g = np.bincount(b, weights=grad[rows], minlength=n_bins)
    h = np.bincount(b, weights=hess[rows], minlength=n_bins)
    c = np.bincount(b, minlength=n_bins).astype(np.int64)
    return g, h, c
