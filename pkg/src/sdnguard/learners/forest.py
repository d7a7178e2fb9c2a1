"""Bagged (random forest) and extremely randomized tree ensembles.

Ensemble probability is the arithmetic mean of member leaf distributions.
Member trees get independent pre-assigned seeds, so fitting them in any
order (or in parallel) yields the same model.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import DataError
from .base import Classifier, check_fit_inputs
from .tree import Tree, build_classification_tree


class _ForestBase(Classifier):
    mode: str

    def __init__(self, n_trees=100, max_depth=None, feature_subsample=None, seed=0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.feature_subsample = feature_subsample
        self.seed = seed
        self.trees_: list[Tree] = []

    def _n_candidate_features(self, d: int) -> int:
        if self.feature_subsample is not None:
            return min(self.feature_subsample, d)
        return min(math.ceil(math.sqrt(d)), d)

    def _fit_one(self, X, y, tree_seed) -> Tree:
        raise NotImplementedError

    def fit(self, X, y, n_classes=None, threads=1):
        X, y = check_fit_inputs(X, y)
        self.n_features = X.shape[1]
        self.n_classes = n_classes or int(y.max()) + 1
        seeds = np.random.default_rng(self.seed).integers(
            0, 2**63 - 1, size=self.n_trees
        )
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                self.trees_ = list(
                    pool.map(lambda s: self._fit_one(X, y, int(s)), seeds)
                )
        else:
            self.trees_ = [self._fit_one(X, y, int(s)) for s in seeds]
        return self

    def predict_proba(self, X):
        if not self.trees_:
            raise DataError("model not fitted")
        X = self._check_input(X)
        proba = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees_:
            proba += tree.predict_value(X)
        return proba / len(self.trees_)


class ExtraTreesClassifier(_ForestBase):
    """Per node: one uniform-random threshold per candidate feature, best of
    those by Gini; no bootstrap (each tree sees the full sample)."""

    mode = "extra"

    def _fit_one(self, X, y, tree_seed) -> Tree:
        rng = np.random.default_rng(tree_seed)
        return build_classification_tree(
            X,
            y,
            self.n_classes,
            max_depth=self.max_depth,
            max_features=self._n_candidate_features(self.n_features),
            rng=rng,
            splitter="random",
        )


class RandomForestClassifier(_ForestBase):
    """Bootstrap sample per tree; exact Gini splits within a per-node
    uniform-random feature subset (default ceil(sqrt(d)))."""

    mode = "bagged"

    def _fit_one(self, X, y, tree_seed) -> Tree:
        rng = np.random.default_rng(tree_seed)
        n = X.shape[0]
        boot = rng.integers(0, n, size=n)
        return build_classification_tree(
            X[boot],
            y[boot],
            self.n_classes,
            max_depth=self.max_depth,
            max_features=self._n_candidate_features(self.n_features),
            rng=rng,
            splitter="exact",
        )
