"""Kernel SHAP: Shapley-kernel-weighted least squares over coalitions.

Missing features are imputed by background averaging; the efficiency
constraint (attributions sum to f(x) minus the background expectation) is
enforced exactly by variable elimination. With full coalition enumeration
the solution equals the exact Shapley values for any model."""

from itertools import combinations
from math import comb

import numpy as np

from ..errors import UsageError


def _shapley_kernel_weight(d: int, s: int) -> float:
    return (d - 1) / (comb(d, s) * s * (d - s))


def _coalitions(d: int, n_coalitions, rng):
    """Binary coalition matrix and kernel weights; enumerates everything
    when the budget allows, otherwise samples sizes by kernel mass."""
    full = 2**d - 2
    if n_coalitions is None or n_coalitions >= full:
        Z = []
        w = []
        for s in range(1, d):
            ws = _shapley_kernel_weight(d, s)
            for subset in combinations(range(d), s):
                row = np.zeros(d)
                row[list(subset)] = 1.0
                Z.append(row)
                w.append(ws)
        return np.asarray(Z), np.asarray(w), True
    sizes = np.arange(1, d)
    size_mass = np.array([(d - 1) / (s * (d - s)) for s in sizes])
    size_mass /= size_mass.sum()
    Z = np.zeros((n_coalitions, d))
    for i in range(n_coalitions):
        s = int(rng.choice(sizes, p=size_mass))
        subset = rng.choice(d, size=s, replace=False)
        Z[i, subset] = 1.0
    # sampling already followed the kernel; coalitions are equally weighted
    return Z, np.ones(n_coalitions), False


def kernel_shap(
    model_fn,
    x: np.ndarray,
    background: np.ndarray,
    n_coalitions: int | None = None,
    seed: int = 0,
):
    """Attribution row for one sample.

    model_fn maps (m, d) -> (m, C). Returns (phi (d, C), base (C,), flags).
    The empty and full coalitions enter through the constraint terms (base
    and f(x)); interior coalitions through the weighted regression."""
    x = np.asarray(x, dtype=np.float64)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    d = x.shape[0]
    if d < 1 or background.shape[0] < 1:
        raise UsageError("need d >= 1 and a nonempty background")
    rng = np.random.default_rng(seed)
    flags: list[str] = []

    base = np.atleast_2d(model_fn(background)).mean(axis=0)
    fx = np.atleast_2d(model_fn(x[None, :]))[0]
    delta = fx - base
    C = base.shape[0]
    if d == 1:
        return delta[None, :].copy(), base, flags

    Z, w, _ = _coalitions(d, n_coalitions, rng)
    m = Z.shape[0]
    vals = np.empty((m, C))
    nb = background.shape[0]
    for i in range(m):
        imputed = background.copy()
        on = Z[i].astype(bool)
        imputed[:, on] = x[on]
        vals[i] = np.atleast_2d(model_fn(imputed)).mean(axis=0)
    y = vals - base[None, :]

    # eliminate the last feature via the efficiency constraint
    A = Z[:, : d - 1] - Z[:, d - 1 : d]
    B = y - Z[:, d - 1 : d] * delta[None, :]
    sw = np.sqrt(w)[:, None]
    Aw = A * sw
    Bw = B * sw
    sol, _, rank, _ = np.linalg.lstsq(Aw, Bw, rcond=None)
    if rank < d - 1:
        # rank-deficient design: ridge fallback
        flags.append("singular regression system; ridge fallback applied")
        G = Aw.T @ Aw + 1e-10 * np.eye(d - 1)
        sol = np.linalg.solve(G, Aw.T @ Bw)
    phi = np.vstack([sol, delta[None, :] - sol.sum(axis=0)])
    return phi, base, flags
