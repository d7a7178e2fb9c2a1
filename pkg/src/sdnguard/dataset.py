"""The dense dataset passed between pipeline stages, plus its on-disk cache.

Binary container layout (little-endian, documented in docs/formats.md):

    magic   4 bytes  b"SGDS"
    version u32      currently 1
    n       u64      number of rows
    d       u64      number of features
    meta    u32 length + UTF-8 JSON {"feature_names": [...], "class_names": [...]}
    X       n*d float64, row-major
    y       n int64
"""

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataError

MAGIC = b"SGDS"
VERSION = 1


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray  # (n, d) float64
    y: np.ndarray  # (n,) int64 class ids
    feature_names: list[str]
    class_names: list[str]

    def __post_init__(self):
        object.__setattr__(self, "X", np.ascontiguousarray(self.X, dtype=np.float64))
        object.__setattr__(self, "y", np.ascontiguousarray(self.y, dtype=np.int64))
        if self.X.ndim != 2:
            raise DataError("X must be 2-dimensional")
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError("X and y row counts differ")
        if self.X.shape[1] != len(self.feature_names):
            raise DataError("feature_names length does not match X width")
        if not np.isfinite(self.X).all():
            raise DataError("X contains NaN/Inf")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.class_names)):
            raise DataError("label outside [0, n_classes)")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def take(self, idx: np.ndarray) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx], self.feature_names, self.class_names)

    def select_features(self, indices) -> "Dataset":
        indices = list(indices)
        return Dataset(
            self.X[:, indices],
            self.y,
            [self.feature_names[i] for i in indices],
            self.class_names,
        )


def save_dataset(ds: Dataset, path) -> None:
    meta = json.dumps(
        {"feature_names": ds.feature_names, "class_names": ds.class_names}
    ).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQQ", VERSION, ds.n_rows, ds.n_features))
        fh.write(struct.pack("<I", len(meta)))
        fh.write(meta)
        fh.write(ds.X.astype("<f8").tobytes())
        fh.write(ds.y.astype("<i8").tobytes())


def load_dataset(path) -> Dataset:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise DataError(f"{path}: not a dataset container")
        version, n, d = struct.unpack("<IQQ", fh.read(20))
        if version != VERSION:
            raise DataError(f"{path}: unsupported container version {version}")
        (meta_len,) = struct.unpack("<I", fh.read(4))
        meta = json.loads(fh.read(meta_len))
        X = np.frombuffer(fh.read(n * d * 8), dtype="<f8").reshape(n, d)
        y = np.frombuffer(fh.read(n * 8), dtype="<i8")
    return Dataset(X.copy(), y.copy(), meta["feature_names"], meta["class_names"])
