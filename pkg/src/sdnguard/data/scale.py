"""Z-score standardization fitted on the training partition.

Population standard deviation (divide by n). A constant feature has
stddev 0 and transforms every value to exactly 0.
"""

import json
from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset
from ..errors import DataError

SCHEMA_VERSION = 1


@dataclass
class ScalerParams:
    mean: np.ndarray
    stddev: np.ndarray
    feature_names: list[str]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "schema_version": SCHEMA_VERSION,
                    "feature_names": self.feature_names,
                    "mean": self.mean.tolist(),
                    "stddev": self.stddev.tolist(),
                },
                fh,
                indent=2,
            )

    @classmethod
    def load(cls, path) -> "ScalerParams":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls(
            mean=np.asarray(doc["mean"], dtype=np.float64),
            stddev=np.asarray(doc["stddev"], dtype=np.float64),
            feature_names=doc["feature_names"],
        )


def fit_scaler(train: Dataset) -> ScalerParams:
    mean = train.X.mean(axis=0)
    stddev = train.X.std(axis=0)  # population (ddof=0)
    return ScalerParams(mean=mean, stddev=stddev, feature_names=list(train.feature_names))


def apply_scaler(params: ScalerParams, ds: Dataset) -> Dataset:
    if ds.n_features != params.mean.shape[0]:
        raise DataError(
            f"scaler fitted for {params.mean.shape[0]} features, "
            f"dataset has {ds.n_features}"
        )
    safe = np.where(params.stddev > 0, params.stddev, 1.0)
    X = (ds.X - params.mean) / safe
    X[:, params.stddev == 0] = 0.0
    return Dataset(X, ds.y, ds.feature_names, ds.class_names)
