import numpy as np
import pytest

from sdnguard.data import generate_synthetic


@pytest.fixture(scope="session")
def blobs():
    """Well-separated 3-class blobs, easy for any sane classifier."""
    return generate_synthetic(3, 4, 200, 10.0, seed=42)


@pytest.fixture(scope="session")
def blobs_split(blobs):
    from sdnguard.data import SplitSpec, stratified_split

    return stratified_split(blobs, SplitSpec(test_fraction=0.2, seed=7))


def nearest_mean_accuracy(train, test):
    """Oracle: classify by nearest class mean."""
    means = np.stack([train.X[train.y == c].mean(axis=0) for c in range(train.n_classes)])
    d = ((test.X[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    return (np.argmin(d, axis=1) == test.y).mean()
