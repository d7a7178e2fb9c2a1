"""Column dropping, label encoding, and numeric parsing of raw tables."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..dataset import Dataset
from ..errors import DataError
from .ingest import RawTable

SCHEMA_VERSION = 1


@dataclass
class EncodingMap:
    """Per-column categorical dictionaries, ids assigned lexicographically."""

    columns: dict[str, dict[str, int]]

    def encode(self, column: str, value: str) -> int:
        mapping = self.columns[column]
        if value not in mapping:
            raise DataError(f"unseen value {value!r} in column {column!r}")
        return mapping[value]

    def decode(self, column: str, code: int) -> str:
        for value, c in self.columns[column].items():
            if c == code:
                return value
        raise DataError(f"code {code} unknown for column {column!r}")

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                {"schema_version": SCHEMA_VERSION, "columns": self.columns},
                fh,
                indent=2,
                sort_keys=True,
            )

    @classmethod
    def load(cls, path) -> "EncodingMap":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls(columns=doc["columns"])


@dataclass
class PrepareReport:
    n_input_rows: int
    n_kept_rows: int
    n_dropped_rows: int
    dropped_columns: list[str] = field(default_factory=list)


def _fit_encoding(raw: RawTable, columns: list[str]) -> EncodingMap:
    enc: dict[str, dict[str, int]] = {}
    for name in columns:
        j = raw.column_index(name)
        values = sorted({row[j] for row in raw.rows})
        enc[name] = {v: i for i, v in enumerate(values)}
    return EncodingMap(columns=enc)


def prepare(
    raw: RawTable,
    drop_cols: list[str],
    categorical_cols: list[str],
    label_col: str = "Label",
    encoding: EncodingMap | None = None,
) -> tuple[Dataset, EncodingMap, PrepareReport]:
    """Turn a raw table into a model-ready Dataset.

    Listed columns are dropped, categoricals (label included) are replaced by
    lexicographic integer codes, remaining cells are parsed as float64. Rows
    with unparseable or non-finite numeric cells are dropped and counted.
    """
    if label_col not in raw.column_names:
        raise DataError(f"label column {label_col!r} missing")
    if label_col not in categorical_cols:
        raise DataError("label column must be listed among categorical columns")
    for name in list(drop_cols) + list(categorical_cols):
        if name not in raw.column_names:
            raise DataError(f"column {name!r} not in table")

    dropset = set(drop_cols)
    if encoding is None:
        encoding = _fit_encoding(raw, [c for c in categorical_cols if c not in dropset])

    feature_names = [
        c for c in raw.column_names if c not in dropset and c != label_col
    ]
    cat_idx = {
        raw.column_index(c): c
        for c in categorical_cols
        if c not in dropset and c != label_col
    }
    feat_src = [raw.column_index(c) for c in feature_names]
    label_src = raw.column_index(label_col)

    n_in = raw.n_rows
    X = np.empty((n_in, len(feature_names)), dtype=np.float64)
    y = np.empty(n_in, dtype=np.int64)
    kept = 0
    for row in raw.rows:
        ok = True
        for k, j in enumerate(feat_src):
            if j in cat_idx:
                X[kept, k] = encoding.encode(cat_idx[j], row[j])
            else:
                try:
                    v = float(row[j])
                except ValueError:
                    ok = False
                    break
                if not math.isfinite(v):
                    ok = False
                    break
                X[kept, k] = v
        if not ok:
            continue
        y[kept] = encoding.encode(label_col, row[label_src])
        kept += 1

    if kept == 0:
        raise DataError("all rows dropped during preparation")
    class_names = [
        v for v, _ in sorted(encoding.columns[label_col].items(), key=lambda kv: kv[1])
    ]
    ds = Dataset(X[:kept], y[:kept], feature_names, class_names)
    report = PrepareReport(
        n_input_rows=n_in,
        n_kept_rows=kept,
        n_dropped_rows=n_in - kept,
        dropped_columns=list(drop_cols),
    )
    return ds, encoding, report
