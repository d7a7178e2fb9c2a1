"""Second-order gradient-boosted trees: multiclass softmax objective,
histogram split candidates, leaf-wise growth by best gain.

Per round and class a regression tree is fit to g = p - 1{y=c},
h = p(1-p); leaves take the Newton step -sum(g)/(sum(h)+lambda). The base
score is the vector of log class priors, so zero rounds predict priors.
"""

import heapq

import numpy as np

from .. import _kernels
from ..errors import DataError
from .base import Classifier, check_fit_inputs
from .mlp import softmax
from .tree import Tree, _TreeBuilder


def _bin_columns(X, n_bins):
    """Quantile bin edges per feature; code <= b iff x <= edges[b]."""
    edges = []
    codes = np.empty(X.shape, dtype=np.int32, order="F")
    qs = np.linspace(0.0, 1.0, n_bins + 1)[1:-1]
    for j in range(X.shape[1]):
        e = np.unique(np.quantile(X[:, j], qs))
        edges.append(e)
        codes[:, j] = np.searchsorted(e, X[:, j], side="left")
    return codes, edges


class _LeafState:
    __slots__ = ("node", "rows", "grad_sum", "hess_sum")

    def __init__(self, node, rows, grad_sum, hess_sum):
        self.node = node
        self.rows = rows
        self.grad_sum = grad_sum
        self.hess_sum = hess_sum


def build_histogram_tree(
    codes, edges, grad, hess, max_leaves, reg_lambda, min_child_weight
) -> Tree:
    d = codes.shape[1]
    builder = _TreeBuilder(value_dim=1)

    def leaf_value(g, h):
        return np.array([-g / (h + reg_lambda)])

    def best_split(leaf: _LeafState):
        best = None  # (gain, feature, bin, nl)
        parent = leaf.grad_sum**2 / (leaf.hess_sum + reg_lambda)
        for f in range(d):
            n_bins = len(edges[f]) + 1
            if n_bins < 2:
                continue
            g_hist, h_hist, c_hist = _kernels.hist_build(
                np.ascontiguousarray(codes[:, f]),
                leaf.rows,
                grad,
                hess,
                n_bins,
            )
            gl = np.cumsum(g_hist)[:-1]
            hl = np.cumsum(h_hist)[:-1]
            cl = np.cumsum(c_hist)[:-1]
            gr = leaf.grad_sum - gl
            hr = leaf.hess_sum - hl
            cr = leaf.rows.shape[0] - cl
            valid = (
                (cl > 0)
                & (cr > 0)
                & (hl >= min_child_weight)
                & (hr >= min_child_weight)
            )
            if not valid.any():
                continue
            gain = np.where(
                valid,
                gl**2 / (hl + reg_lambda) + gr**2 / (hr + reg_lambda) - parent,
                -np.inf,
            )
            b = int(np.argmax(gain))
            if gain[b] > 0 and (best is None or gain[b] > best[0]):
                best = (float(gain[b]), f, b, int(cl[b]))
        return best

    root_rows = np.arange(codes.shape[0], dtype=np.int32)
    g0 = float(grad[root_rows].sum())
    h0 = float(hess[root_rows].sum())
    root = _LeafState(builder.add_node(len(root_rows), leaf_value(g0, h0)), root_rows, g0, h0)

    heap = []
    counter = 0
    split = best_split(root)
    if split is not None:
        heap.append((-split[0], counter, root, split))
        counter += 1
    n_leaves = 1
    while heap and n_leaves < max_leaves:
        _, _, leaf, (gain, f, b, _) = heapq.heappop(heap)
        mask = codes[leaf.rows, f] <= b
        rows_l = leaf.rows[mask]
        rows_r = leaf.rows[~mask]
        gl = float(grad[rows_l].sum())
        hl = float(hess[rows_l].sum())
        gr = leaf.grad_sum - gl
        hr = leaf.hess_sum - hl
        left = _LeafState(
            builder.add_node(len(rows_l), leaf_value(gl, hl)), rows_l, gl, hl
        )
        right = _LeafState(
            builder.add_node(len(rows_r), leaf_value(gr, hr)), rows_r, gr, hr
        )
        builder.set_decision(leaf.node, f, float(edges[f][b]))
        builder.set_child(leaf.node, True, left.node)
        builder.set_child(leaf.node, False, right.node)
        n_leaves += 1
        for child in (left, right):
            s = best_split(child)
            if s is not None:
                heapq.heappush(heap, (-s[0], counter, child, s))
                counter += 1
    return builder.freeze()


class GbdtClassifier(Classifier):
    def __init__(
        self,
        n_rounds=200,
        learning_rate=0.1,
        max_leaves=31,
        min_child_weight=1e-3,
        reg_lambda=1.0,
        n_bins=256,
        seed=0,
    ):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_leaves = max_leaves
        self.min_child_weight = min_child_weight
        self.reg_lambda = reg_lambda
        self.n_bins = n_bins
        self.seed = seed  # reserved; the fit itself is deterministic
        self.base_score_: np.ndarray | None = None
        self.trees_: list[list[Tree]] = []  # [round][class]

    def fit(self, X, y, n_classes=None):
        X, y = check_fit_inputs(X, y)
        self.n_features = X.shape[1]
        self.n_classes = n_classes or int(y.max()) + 1
        n = X.shape[0]
        priors = np.bincount(y, minlength=self.n_classes) / n
        self.base_score_ = np.log(np.clip(priors, 1e-12, None))
        codes, edges = _bin_columns(X, self.n_bins)
        margins = np.tile(self.base_score_, (n, 1))
        onehot = np.zeros((n, self.n_classes))
        onehot[np.arange(n), y] = 1.0
        self.trees_ = []
        for _ in range(self.n_rounds):
            p = softmax(margins)
            round_trees = []
            for c in range(self.n_classes):
                grad = np.ascontiguousarray(p[:, c] - onehot[:, c])
                hess = np.ascontiguousarray(p[:, c] * (1.0 - p[:, c]))
                tree = build_histogram_tree(
                    codes,
                    edges,
                    grad,
                    hess,
                    self.max_leaves,
                    self.reg_lambda,
                    self.min_child_weight,
                )
                margins[:, c] += self.learning_rate * tree.predict_value(X)[:, 0]
                round_trees.append(tree)
            self.trees_.append(round_trees)
        return self

    def decision_margin(self, X, n_rounds=None):
        if self.base_score_ is None:
            raise DataError("model not fitted")
        X = self._check_input(X)
        margins = np.tile(self.base_score_, (X.shape[0], 1))
        rounds = self.trees_ if n_rounds is None else self.trees_[:n_rounds]
        for round_trees in rounds:
            for c, tree in enumerate(round_trees):
                margins[:, c] += self.learning_rate * tree.predict_value(X)[:, 0]
        return margins

    def predict_proba(self, X):
        return softmax(self.decision_margin(X))
