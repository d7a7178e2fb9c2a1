"""k-nearest-neighbor classifier, Euclidean distance, chunked brute force.

Fit stores the training set verbatim. Ties resolve to the lowest index:
equidistant neighbors by training row, tied votes by class id.
"""

import numpy as np

from ..errors import DataError
from .base import Classifier, check_fit_inputs


class KnnClassifier(Classifier):
    def __init__(self, k=5, chunk_size=256, seed=0):
        self.k = k
        self.chunk_size = chunk_size
        self.seed = seed  # unused; kept for the uniform learner interface
        self.X_: np.ndarray | None = None
        self.y_: np.ndarray | None = None

    def fit(self, X, y, n_classes=None):
        X, y = check_fit_inputs(X, y)
        self.n_features = X.shape[1]
        self.n_classes = n_classes or int(y.max()) + 1
        self.X_ = X
        self.y_ = y
        return self

    def predict_proba(self, X):
        if self.X_ is None:
            raise DataError("model not fitted")
        X = self._check_input(X)
        n = X.shape[0]
        k = min(self.k, self.X_.shape[0])
        train_sq = (self.X_ * self.X_).sum(axis=1)
        proba = np.empty((n, self.n_classes))
        for start in range(0, n, self.chunk_size):
            chunk = X[start : start + self.chunk_size]
            d2 = train_sq[None, :] - 2.0 * chunk @ self.X_.T
            # stable sort keeps lower training-row index first on distance ties
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
            votes = self.y_[nearest]
            counts = np.zeros((chunk.shape[0], self.n_classes))
            for j in range(k):
                counts[np.arange(chunk.shape[0]), votes[:, j]] += 1.0
            proba[start : start + self.chunk_size] = counts / k
        return proba
