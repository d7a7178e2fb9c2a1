"""Common classifier contract: fit once, emit row-stochastic probabilities."""

import abc

import numpy as np

from ..errors import DataError


class Classifier(abc.ABC):
    """Fitted models are immutable; predict is safe for concurrent callers."""

    n_classes: int
    n_features: int

    @abc.abstractmethod
    def fit(self, X: np.ndarray, y: np.ndarray) -> "Classifier":
        ...

    @abc.abstractmethod
    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        ...

    def predict(self, X: np.ndarray) -> np.ndarray:
        # argmax resolves probability ties to the lowest class id
        return np.argmax(self.predict_proba(X), axis=1)

    def _check_input(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DataError(
                f"expected {self.n_features} features, got shape {X.shape}"
            )
        return X


def check_fit_inputs(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DataError("inconsistent fit inputs")
    if X.shape[0] < 1:
        raise DataError("empty training set")
    return X, y
