"""Feature screening and selection: one-way ANOVA F-test, nearest-neighbor
mutual information against a discrete target, and top-k picking."""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .special import digamma, f_sf

SCHEMA_VERSION = 1


@dataclass
class AnovaResult:
    f_values: np.ndarray  # (d,), may contain +inf
    p_values: np.ndarray  # (d,) in [0,1]
    df_between: int
    df_within: int
    feature_names: list[str] = field(default_factory=list)

    def insignificant(self, alpha: float = 0.05) -> np.ndarray:
        """Indices of features whose p-value exceeds alpha."""
        return np.flatnonzero(self.p_values > alpha)

    def to_json_dict(self) -> dict:
        names = self.feature_names or [str(i) for i in range(len(self.f_values))]
        return {
            "schema_version": SCHEMA_VERSION,
            "df_between": self.df_between,
            "df_within": self.df_within,
            "features": [
                {"name": n, "F": float(f), "p": float(p)}
                for n, f, p in zip(names, self.f_values, self.p_values)
            ],
        }


@dataclass
class MiScores:
    scores: np.ndarray  # (d,) nats, >= 0
    n_neighbors: int
    jitter_seed: int
    feature_names: list[str] = field(default_factory=list)


@dataclass
class Selection:
    indices: list[int]  # descending score, ties by ascending index
    names: list[str]
    k: int
    scores: list[float]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "k": self.k,
            "selected": [
                {"index": i, "name": n, "score": s}
                for i, n, s in zip(self.indices, self.names, self.scores)
            ],
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)


def anova_f(X: np.ndarray, y: np.ndarray, feature_names=None) -> AnovaResult:
    """One-way ANOVA per column: F = (SS_between/df_b) / (SS_within/df_w),
    p from the F survival function. Zero within-group variance with nonzero
    between-group variance yields F = +inf, p = 0."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    n, d = X.shape
    C = classes.size
    if C < 2:
        raise UsageError("ANOVA needs at least 2 classes")
    if n <= C:
        raise UsageError("ANOVA needs more samples than classes")
    grand = X.mean(axis=0)
    ss_between = np.zeros(d)
    ss_within = np.zeros(d)
    for c in classes:
        Xc = X[y == c]
        mc = Xc.mean(axis=0)
        ss_between += Xc.shape[0] * (mc - grand) ** 2
        ss_within += ((Xc - mc) ** 2).sum(axis=0)
    df_b = C - 1
    df_w = n - C
    with np.errstate(divide="ignore", invalid="ignore"):
        f = (ss_between / df_b) / (ss_within / df_w)
    # both sums of squares zero: constant feature, no group effect
    f[np.isnan(f)] = 0.0
    p = np.array([f_sf(v, df_b, df_w) for v in f])
    return AnovaResult(
        f_values=f,
        p_values=p,
        df_between=df_b,
        df_within=df_w,
        feature_names=list(feature_names) if feature_names else [],
    )


def _kth_distance_sorted(xs: np.ndarray, k: int) -> np.ndarray:
    """Distance from each point of a sorted 1-D array to its k-th nearest
    neighbor within the same array (self excluded)."""
    n = xs.size
    # window of k+1 consecutive points containing the query has max extent
    # equal to a candidate k-NN radius; the true radius is the window minimum
    r = np.full(n, np.inf)
    for t in range(k + 1):
        lo = np.arange(n) - t
        hi = lo + k
        ok = (lo >= 0) & (hi < n)
        ext = np.maximum(xs[ok] - xs[lo[ok]], xs[hi[ok]] - xs[ok])
        r[ok] = np.minimum(r[ok], ext)
    return r


def _mi_feature(x: np.ndarray, y: np.ndarray, k: int) -> float:
    """Nearest-neighbor MI between one continuous column and discrete y,
    per-class k-th neighbor radii and full-sample strict-interior counts."""
    classes, counts = np.unique(y, return_counts=True)
    keep = counts[np.searchsorted(classes, y)] > 1
    x = x[keep]
    y = y[keep]
    n = x.size
    if n == 0:
        return 0.0
    radius = np.empty(n)
    k_used = np.empty(n)
    n_class = np.empty(n)
    for c, cnt in zip(classes, counts):
        if cnt <= 1:
            continue
        mask = y == c
        xc = x[mask]
        order = np.argsort(xc, kind="stable")
        kc = min(k, cnt - 1)
        r = np.empty(cnt)
        r[order] = _kth_distance_sorted(xc[order], kc)
        radius[mask] = r
        k_used[mask] = kc
        n_class[mask] = cnt
    xs = np.sort(x, kind="stable")
    lo = np.searchsorted(xs, x - radius, side="right")
    hi = np.searchsorted(xs, x + radius, side="left")
    m = (hi - lo).astype(np.float64)  # strictly inside radius, self included
    m = np.maximum(m, 1.0)
    mi = (
        digamma(float(n))
        - np.mean(digamma(n_class))
        + np.mean(digamma(k_used))
        - np.mean(digamma(m))
    )
    return max(float(mi), 0.0)


def mutual_info(
    X: np.ndarray, y: np.ndarray, k: int = 3, seed: int = 0, feature_names=None
) -> MiScores:
    """Per-feature MI (nats) against the class label.

    A deterministic seeded jitter of 1e-10 x per-feature scale breaks exact
    ties before neighbor search; constant features score 0; negatives are
    clipped to 0."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    n, d = X.shape
    if n <= k + 1:
        raise UsageError(f"need more than k+1={k + 1} samples")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n, d))
    scores = np.zeros(d)
    for j in range(d):
        col = X[:, j]
        scale = np.max(np.abs(col))
        if scale == 0 or col.min() == col.max():
            continue
        jittered = col + 1e-10 * scale * noise[:, j]
        scores[j] = _mi_feature(jittered, y, k)
    return MiScores(
        scores=scores,
        n_neighbors=k,
        jitter_seed=seed,
        feature_names=list(feature_names) if feature_names else [],
    )


def select_k_best(scores: MiScores, k: int) -> Selection:
    d = scores.scores.shape[0]
    if k > d:
        raise UsageError(f"k={k} exceeds feature count {d}")
    order = sorted(range(d), key=lambda i: (-scores.scores[i], i))[:k]
    names = scores.feature_names or [str(i) for i in range(d)]
    return Selection(
        indices=list(order),
        names=[names[i] for i in order],
        k=k,
        scores=[float(scores.scores[i]) for i in order],
    )
