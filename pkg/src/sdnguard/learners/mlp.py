"""Feed-forward network: ReLU hidden layers, softmax output, Adam updates.

The forward/backward pass lives in module-level functions so tests can run
finite-difference gradient checks against the analytic gradients.
"""

import numpy as np

from ..errors import DataError, NumericalError
from .base import Classifier, check_fit_inputs


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(weights, biases, X):
    """Returns (activations per layer, probabilities)."""
    acts = [X]
    a = X
    for W, b in zip(weights[:-1], biases[:-1]):
        a = np.maximum(a @ W + b, 0.0)
        acts.append(a)
    probs = softmax(a @ weights[-1] + biases[-1])
    return acts, probs


def loss_and_grads(weights, biases, X, y, l2=0.0):
    """Mean cross-entropy (+ L2 on weights) and its gradients."""
    n = X.shape[0]
    acts, probs = forward(weights, biases, X)
    eps = 1e-12
    loss = -np.log(probs[np.arange(n), y] + eps).mean()
    loss += 0.5 * l2 * sum(float((W * W).sum()) for W in weights)

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grads_w = []
    grads_b = []
    for i in range(len(weights) - 1, -1, -1):
        grads_w.append(acts[i].T @ delta + l2 * weights[i])
        grads_b.append(delta.sum(axis=0))
        if i > 0:
            delta = (delta @ weights[i].T) * (acts[i] > 0)
    return loss, grads_w[::-1], grads_b[::-1]


class MlpClassifier(Classifier):
    def __init__(
        self,
        hidden=(128, 64),
        epochs=30,
        batch_size=256,
        lr=1e-3,
        adam_betas=(0.9, 0.999),
        l2=0.0,
        seed=0,
    ):
        self.hidden = tuple(hidden)
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.adam_betas = adam_betas
        self.l2 = l2
        self.seed = seed
        self.weights_: list[np.ndarray] = []
        self.biases_: list[np.ndarray] = []

    def fit(self, X, y, n_classes=None):
        X, y = check_fit_inputs(X, y)
        self.n_features = X.shape[1]
        self.n_classes = n_classes or int(y.max()) + 1
        rng = np.random.default_rng(self.seed)
        sizes = [self.n_features, *self.hidden, self.n_classes]
        self.weights_ = [
            rng.standard_normal((a, b)) * np.sqrt(2.0 / a)
            for a, b in zip(sizes[:-1], sizes[1:])
        ]
        self.biases_ = [np.zeros(b) for b in sizes[1:]]

        b1, b2 = self.adam_betas
        eps = 1e-8
        m_w = [np.zeros_like(W) for W in self.weights_]
        v_w = [np.zeros_like(W) for W in self.weights_]
        m_b = [np.zeros_like(b) for b in self.biases_]
        v_b = [np.zeros_like(b) for b in self.biases_]
        t = 0
        n = X.shape[0]
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start : start + self.batch_size]
                loss, gw, gb = loss_and_grads(
                    self.weights_, self.biases_, X[batch], y[batch], self.l2
                )
                if not np.isfinite(loss):
                    raise NumericalError(
                        f"non-finite training loss at step {t}; "
                        "lower the learning rate or rescale the inputs"
                    )
                t += 1
                corr1 = 1.0 - b1**t
                corr2 = 1.0 - b2**t
                for i in range(len(self.weights_)):
                    m_w[i] = b1 * m_w[i] + (1 - b1) * gw[i]
                    v_w[i] = b2 * v_w[i] + (1 - b2) * gw[i] ** 2
                    self.weights_[i] -= (
                        self.lr * (m_w[i] / corr1) / (np.sqrt(v_w[i] / corr2) + eps)
                    )
                    m_b[i] = b1 * m_b[i] + (1 - b1) * gb[i]
                    v_b[i] = b2 * v_b[i] + (1 - b2) * gb[i] ** 2
                    self.biases_[i] -= (
                        self.lr * (m_b[i] / corr1) / (np.sqrt(v_b[i] / corr2) + eps)
                    )
        return self

    def predict_proba(self, X):
        if not self.weights_:
            raise DataError("model not fitted")
        _, probs = forward(self.weights_, self.biases_, self._check_input(X))
        return probs
