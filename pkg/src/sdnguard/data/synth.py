"""Gaussian-blob generator for desk-scale tests."""

import numpy as np

from ..dataset import Dataset
from ..errors import UsageError


def generate_synthetic(
    n_classes: int,
    n_features: int,
    n_per_class: int,
    class_separation: float,
    seed: int = 0,
) -> Dataset:
    """Unit-covariance Gaussian blobs with class means at pairwise distance
    >= class_separation. Rows are grouped by class, labels correct by
    construction."""
    if n_classes < 1 or n_features < 1 or n_per_class < 1:
        raise UsageError("counts must be >= 1")
    rng = np.random.default_rng(seed)
    means = np.zeros((n_classes, n_features))
    # Class c sits on axis (c mod d) at multiple (c // d + 1) of the
    # separation; any two means are then at least class_separation apart.
    for c in range(n_classes):
        means[c, c % n_features] = (c // n_features + 1) * class_separation
    n = n_classes * n_per_class
    X = rng.standard_normal((n, n_features))
    y = np.repeat(np.arange(n_classes), n_per_class)
    X += means[y]
    return Dataset(
        X,
        y,
        [f"f{j}" for j in range(n_features)],
        [f"class_{c}" for c in range(n_classes)],
    )
