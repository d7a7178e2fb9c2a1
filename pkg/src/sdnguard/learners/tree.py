"""Array-backed binary trees and the CART / extra-trees node builders.

One flat structure serves classification trees (leaf payload = class
distribution), ensemble members, and GBDT regression trees (payload =
scalar Newton leaf value). Nodes keep their training cover counts, which
the TreeSHAP explainer needs.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..errors import DataError
from .base import Classifier, check_fit_inputs

LEAF = -1


@dataclass
class Tree:
    feature: np.ndarray  # (n_nodes,) int64, LEAF for leaves
    threshold: np.ndarray  # (n_nodes,) float64
    left: np.ndarray  # (n_nodes,) int64
    right: np.ndarray  # (n_nodes,) int64
    cover: np.ndarray  # (n_nodes,) float64 training rows through the node
    value: np.ndarray  # (n_nodes, value_dim) float64

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def value_dim(self) -> int:
        return self.value.shape[1]

    def max_depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[i] + 1
                depth[self.right[i]] = depth[i] + 1
        return int(depth.max(initial=0))

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node index per row. Left child takes x[f] <= threshold."""
        n = X.shape[0]
        out = np.empty(n, dtype=np.int64)
        stack = [(0, np.arange(n))]
        while stack:
            node, rows = stack.pop()
            if rows.size == 0:
                continue
            f = self.feature[node]
            if f == LEAF:
                out[rows] = node
                continue
            go_left = X[rows, f] <= self.threshold[node]
            stack.append((int(self.left[node]), rows[go_left]))
            stack.append((int(self.right[node]), rows[~go_left]))
        return out

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


class _TreeBuilder:
    def __init__(self, value_dim: int):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.cover: list[float] = []
        self.value: list[np.ndarray] = []
        self.value_dim = value_dim

    def add_node(self, cover: float, value: np.ndarray) -> int:
        idx = len(self.feature)
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.cover.append(cover)
        self.value.append(np.asarray(value, dtype=np.float64))
        return idx

    def set_decision(self, idx: int, feature: int, threshold: float):
        self.feature[idx] = feature
        self.threshold[idx] = threshold

    def set_child(self, idx: int, is_left: bool, child: int):
        if is_left:
            self.left[idx] = child
        else:
            self.right[idx] = child

    def freeze(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            cover=np.asarray(self.cover, dtype=np.float64),
            value=np.vstack(self.value),
        )


def _node_distribution(y_node: np.ndarray, n_classes: int) -> np.ndarray:
    counts = np.bincount(y_node, minlength=n_classes).astype(np.float64)
    return counts / counts.sum()


def _gini(y_node: np.ndarray, n_classes: int) -> float:
    p = _node_distribution(y_node, n_classes)
    return 1.0 - float((p * p).sum())


def best_exact_split(X, y, rows, feats, n_classes, min_leaf=1):
    """Exact Gini search over midpoints; features scanned in ascending index
    order, strictly better candidates win (lowest-index tie rule)."""
    y_node = y[rows]
    n = rows.size
    best = None  # (score, feature, threshold)
    for f in feats:
        col = X[rows, f]
        order = np.argsort(col, kind="stable")
        xs = np.ascontiguousarray(col[order])
        ys = np.ascontiguousarray(y_node[order])
        pos, score = _kernels.gini_split_scan(xs, ys, n_classes, min_leaf)
        if pos < 0:
            continue
        if best is None or score > best[0]:
            thr = (xs[pos - 1] + xs[pos]) / 2.0
            best = (score, int(f), float(thr))
    if best is None:
        return None
    score, f, thr = best
    total = np.bincount(y_node, minlength=n_classes).astype(np.float64)
    parent_gini = 1.0 - float((total * total).sum()) / (n * n)
    child_gini = 1.0 - score / n
    return f, thr, parent_gini - child_gini


def best_random_split(X, y, rows, feats, n_classes, rng):
    """Extra-trees rule: one uniform threshold per candidate feature in
    [min, max), best of those by weighted Gini. Constant features skipped."""
    y_node = y[rows]
    n = rows.size
    total = np.bincount(y_node, minlength=n_classes).astype(np.float64)
    parent_score = float((total * total).sum()) / n
    best = None
    for f in feats:
        col = X[rows, f]
        lo = col.min()
        hi = col.max()
        if lo == hi:
            continue
        thr = float(rng.uniform(lo, hi))
        mask = col <= thr
        nl = int(mask.sum())
        if nl == 0 or nl == n:
            continue
        cl = np.bincount(y_node[mask], minlength=n_classes).astype(np.float64)
        cr = total - cl
        score = float((cl * cl).sum()) / nl + float((cr * cr).sum()) / (n - nl)
        if best is None or score > best[0]:
            best = (score, int(f), thr)
    if best is None:
        return None
    score, f, thr = best
    return f, thr, (score - parent_score) / n


def build_classification_tree(
    X,
    y,
    n_classes,
    max_depth=None,
    min_samples_split=2,
    min_impurity_decrease=0.0,
    max_features=None,
    rng=None,
    splitter="exact",
) -> Tree:
    builder = _TreeBuilder(value_dim=n_classes)
    d = X.shape[1]

    def candidates():
        if max_features is None or max_features >= d:
            return np.arange(d)
        return np.sort(rng.choice(d, size=max_features, replace=False))

    # explicit stack, left child expanded first; node ids are preorder
    stack = [(np.arange(X.shape[0]), 0, -1, False)]
    while stack:
        rows, depth, parent, is_left = stack.pop()
        y_node = y[rows]
        node = builder.add_node(float(rows.size), _node_distribution(y_node, n_classes))
        if parent >= 0:
            builder.set_child(parent, is_left, node)
        if (
            rows.size < min_samples_split
            or (max_depth is not None and depth >= max_depth)
            or (y_node == y_node[0]).all()
        ):
            continue
        feats = candidates()
        if splitter == "exact":
            split = best_exact_split(X, y, rows, feats, n_classes)
        else:
            split = best_random_split(X, y, rows, feats, n_classes, rng)
        if split is None or split[2] < min_impurity_decrease:
            continue
        f, thr, _ = split
        builder.set_decision(node, f, thr)
        mask = X[rows, f] <= thr
        stack.append((rows[~mask], depth + 1, node, False))
        stack.append((rows[mask], depth + 1, node, True))
    return builder.freeze()


class DecisionTreeClassifier(Classifier):
    """CART with exact Gini splits over midpoints of distinct values."""

    def __init__(
        self,
        max_depth=None,
        min_samples_split=2,
        min_impurity_decrease=0.0,
        seed=0,
    ):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_impurity_decrease = min_impurity_decrease
        self.seed = seed
        self.tree_: Tree | None = None

    def fit(self, X, y, n_classes=None):
        X, y = check_fit_inputs(X, y)
        self.n_features = X.shape[1]
        self.n_classes = n_classes or int(y.max()) + 1
        self.tree_ = build_classification_tree(
            X,
            y,
            self.n_classes,
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            min_impurity_decrease=self.min_impurity_decrease,
        )
        return self

    def predict_proba(self, X):
        if self.tree_ is None:
            raise DataError("model not fitted")
        return self.tree_.predict_value(self._check_input(X))
