"""Brute-force Shapley values by full coalition enumeration.

Test oracle for the Tree/Kernel SHAP paths; exponential in d, capped at 12
features."""

import math
from itertools import combinations

import numpy as np

from ..errors import UsageError


def shapley_from_value_function(value_fn, d: int) -> np.ndarray:
    """Exact Shapley attribution of an arbitrary set function.

    value_fn maps a frozenset of feature indices to an output vector (C,).
    Returns (d, C)."""
    if d > 12:
        raise UsageError("exact enumeration limited to d <= 12")
    cache = {}

    def v(s):
        if s not in cache:
            cache[s] = np.atleast_1d(np.asarray(value_fn(s), dtype=np.float64))
        return cache[s]

    out_dim = v(frozenset()).shape[0]
    phi = np.zeros((d, out_dim))
    fact = [math.factorial(i) for i in range(d + 1)]
    all_feats = list(range(d))
    for s in range(d):
        w = fact[s] * fact[d - s - 1] / fact[d]
        for subset in combinations(all_feats, s):
            fs = frozenset(subset)
            vs = v(fs)
            for i in all_feats:
                if i not in fs:
                    phi[i] += w * (v(fs | {i}) - vs)
    return phi


def interventional_value_fn(model_fn, x, background):
    """v(S) = mean over background rows of the model on x with the features
    outside S replaced by that row's values."""
    background = np.asarray(background, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)

    def value(subset: frozenset):
        Z = background.copy()
        idx = sorted(subset)
        Z[:, idx] = x[idx]
        out = np.atleast_2d(np.asarray(model_fn(Z), dtype=np.float64))
        if out.shape[0] != Z.shape[0]:
            out = out.T
        return out.mean(axis=0)

    return value


def exact_shapley(model_fn, x, background) -> tuple[np.ndarray, np.ndarray]:
    """Exact Shapley row for one sample; background-averaged imputation.

    Returns (phi (d, C), base (C,)) with base = v(empty set), i.e. the model
    output averaged over the background."""
    x = np.asarray(x, dtype=np.float64)
    value_fn = interventional_value_fn(model_fn, x, background)
    phi = shapley_from_value_function(value_fn, x.shape[0])
    base = np.atleast_1d(np.asarray(value_fn(frozenset()), dtype=np.float64))
    return phi, base
