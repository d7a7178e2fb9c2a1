"""Path-dependent TreeSHAP using training-time node cover counts.

The recursion tracks, per feature on the current decision path, the
fraction of paths flowing through when the feature is unknown (zero
fraction, from covers) versus known (one fraction), together with the
permutation weights of all path-subset sizes. Leaf values may be vectors,
so one traversal attributes every class at once.
"""

import numpy as np

from ..errors import DataError
from ..learners.forest import ExtraTreesClassifier, RandomForestClassifier
from ..learners.gbdt import GbdtClassifier
from ..learners.tree import LEAF, DecisionTreeClassifier, Tree
from .attribution import ShapAttribution


class _Path:
    """Parallel arrays for the decision path: feature index, zero fraction,
    one fraction, and the subset-size weights."""

    __slots__ = ("d", "z", "o", "w")

    def __init__(self):
        self.d: list[int] = []
        self.z: list[float] = []
        self.o: list[float] = []
        self.w: list[float] = []

    def copy(self) -> "_Path":
        p = _Path()
        p.d = self.d[:]
        p.z = self.z[:]
        p.o = self.o[:]
        p.w = self.w[:]
        return p


def _extend(m: _Path, pz: float, po: float, pi: int) -> None:
    l = len(m.d)
    m.d.append(pi)
    m.z.append(pz)
    m.o.append(po)
    m.w.append(1.0 if l == 0 else 0.0)
    for i in range(l - 1, -1, -1):
        m.w[i + 1] += po * m.w[i] * (i + 1) / (l + 1)
        m.w[i] = pz * m.w[i] * (l - i) / (l + 1)


def _unwind(m: _Path, i: int) -> None:
    l = len(m.d) - 1
    o, z = m.o[i], m.z[i]
    n = m.w[l]
    for j in range(l - 1, -1, -1):
        if o != 0:
            t = m.w[j]
            m.w[j] = n * (l + 1) / ((j + 1) * o)
            n = t - m.w[j] * z * (l - j) / (l + 1)
        else:
            m.w[j] = m.w[j] * (l + 1) / (z * (l - j))
    for j in range(i, l):
        m.d[j] = m.d[j + 1]
        m.z[j] = m.z[j + 1]
        m.o[j] = m.o[j + 1]
    del m.d[l], m.z[l], m.o[l], m.w[l]


def _unwound_weight_sum(m: _Path, i: int) -> float:
    l = len(m.d) - 1
    o, z = m.o[i], m.z[i]
    n = m.w[l]
    total = 0.0
    if o != 0:
        for j in range(l - 1, -1, -1):
            t = n * (l + 1) / ((j + 1) * o)
            total += t
            n = m.w[j] - t * z * (l - j) / (l + 1)
    else:
        for j in range(l - 1, -1, -1):
            total += m.w[j] * (l + 1) / (z * (l - j))
    return total


def shap_values_tree(tree: Tree, x: np.ndarray, n_features: int) -> np.ndarray:
    """Per-feature attribution (n_features, value_dim) for one sample."""
    if tree.cover[0] <= 0:
        raise DataError(
            "tree has no cover counts; refit the model with cover tracking"
        )
    phi = np.zeros((n_features, tree.value_dim))

    def recurse(node: int, m: _Path, pz: float, po: float, pi: int):
        m = m.copy()
        _extend(m, pz, po, pi)
        f = tree.feature[node]
        if f == LEAF:
            leaf_value = tree.value[node]
            for i in range(1, len(m.d)):
                w = _unwound_weight_sum(m, i)
                phi[m.d[i]] += w * (m.o[i] - m.z[i]) * leaf_value
            return
        if x[f] <= tree.threshold[node]:
            hot, cold = int(tree.left[node]), int(tree.right[node])
        else:
            hot, cold = int(tree.right[node]), int(tree.left[node])
        iz = io = 1.0
        for k in range(1, len(m.d)):
            if m.d[k] == f:
                iz, io = m.z[k], m.o[k]
                _unwind(m, k)
                break
        r = tree.cover[node]
        recurse(hot, m, iz * tree.cover[hot] / r, io, int(f))
        recurse(cold, m, iz * tree.cover[cold] / r, 0.0, int(f))

    recurse(0, _Path(), 1.0, 1.0, -1)
    return phi


def tree_expected_value(tree: Tree) -> np.ndarray:
    """Cover-weighted expectation of the leaf values."""
    leaves = tree.feature == LEAF
    w = tree.cover[leaves] / tree.cover[leaves].sum()
    return (w[:, None] * tree.value[leaves]).sum(axis=0)


def tree_conditional_expectation(tree: Tree, x: np.ndarray, known: frozenset):
    """Path-dependent value function: follow x on known features, split by
    cover fractions on unknown ones. Brute-force oracle for shap_values_tree."""

    def walk(node: int) -> np.ndarray:
        f = tree.feature[node]
        if f == LEAF:
            return tree.value[node]
        left, right = int(tree.left[node]), int(tree.right[node])
        if f in known:
            return walk(left) if x[f] <= tree.threshold[node] else walk(right)
        r = tree.cover[node]
        return (
            tree.cover[left] / r * walk(left) + tree.cover[right] / r * walk(right)
        )

    return walk(0)


def tree_shap(model, X: np.ndarray) -> ShapAttribution:
    """Attribution for a fitted tree model.

    Single trees and forests are explained in probability space (forest
    attribution = mean over members); GBDT in margin space (sum over all
    rounds, scaled by the learning rate, plus the log-prior base score)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    n, d = X.shape
    if isinstance(model, DecisionTreeClassifier):
        trees = [(model.tree_, 1.0, None)]
        base = tree_expected_value(model.tree_)
        output = model.predict_proba(X)
        space = "probability"
    elif isinstance(model, (ExtraTreesClassifier, RandomForestClassifier)):
        scale = 1.0 / len(model.trees_)
        trees = [(t, scale, None) for t in model.trees_]
        base = sum(scale * tree_expected_value(t) for t in model.trees_)
        output = model.predict_proba(X)
        space = "probability"
    elif isinstance(model, GbdtClassifier):
        trees = [
            (t, model.learning_rate, c)
            for round_trees in model.trees_
            for c, t in enumerate(round_trees)
        ]
        base = np.array(model.base_score_, dtype=np.float64)
        for t, scale, c in trees:
            base[c] += scale * tree_expected_value(t)[0]
        output = model.decision_margin(X)
        space = "margin"
    else:
        raise DataError(f"tree_shap does not support {type(model).__name__}")

    C = output.shape[1]
    values = np.zeros((n, d, C))
    for i in range(n):
        for t, scale, c in trees:
            phi = shap_values_tree(t, X[i], d)
            if c is None:
                values[i] += scale * phi
            else:
                values[i, :, c] += scale * phi[:, 0]
    return ShapAttribution(
        values=values,
        base_values=base,
        model_output=output,
        output_space=space,
        tolerance=1e-6,
    )
