"""Holdout stacking: DT + ET + MLP base learners under a GBDT meta-learner.

Training: the training set is split into an inner train/validation pair;
bases fit on the inner train part, their validation-set predictions become
the meta-learner's features, and the meta-learner fits against the
validation labels. Bases are then refit on the full training set for
serving (disable with refit_bases=False for the literal single-split
reading)."""

from dataclasses import dataclass, field

import numpy as np

from .data.resample import SplitSpec, stratified_split
from .dataset import Dataset
from .errors import DataError, UsageError
from .learners import LEARNERS, GbdtClassifier, make_learner
from .learners.io import read_container, write_container, deserialize_model, serialize_model
from .rng import derive_seed

DEFAULT_BASES = (
    ("decision_tree", {}),
    ("extra_trees", {"n_trees": 100}),
    ("mlp", {}),
)


@dataclass
class StackConfig:
    base_specs: tuple = DEFAULT_BASES
    meta_params: dict = field(default_factory=dict)
    inner_val_fraction: float = 0.25
    meta_feature_kind: str = "probabilities"  # or "labels"
    refit_bases: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.inner_val_fraction < 1.0:
            raise UsageError("inner_val_fraction must be in (0,1)")
        if self.meta_feature_kind not in ("probabilities", "labels"):
            raise UsageError("meta_feature_kind must be 'probabilities' or 'labels'")
        for name, params in self.base_specs:
            if name not in LEARNERS:
                raise UsageError(
                    f"unknown base learner '{name}'; valid names: "
                    + ", ".join(sorted(LEARNERS))
                )
            if not isinstance(params, dict):
                raise UsageError(f"params for base '{name}' must be a mapping")


@dataclass
class StackModel:
    base_models: list
    meta_model: GbdtClassifier
    meta_feature_kind: str
    n_classes: int
    n_features: int
    provenance: dict

    def meta_features(self, X: np.ndarray) -> np.ndarray:
        parts = []
        for model in self.base_models:
            proba = model.predict_proba(X)
            if self.meta_feature_kind == "probabilities":
                parts.append(proba)
            else:
                parts.append(np.argmax(proba, axis=1)[:, None].astype(np.float64))
        return np.hstack(parts)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DataError(f"expected {self.n_features} features, got shape {X.shape}")
        return self.meta_model.predict_proba(self.meta_features(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def fit_stack(train: Dataset, cfg: StackConfig, bases=None) -> StackModel:
    """Algorithm: inner stratified split, base fits on the inner train set,
    meta-learner fit on base predictions over the held-out part.

    `bases` overrides the constructed base learners (used by tests to
    instrument the inner-split data flow)."""
    counts = train.class_counts()
    present = counts[counts > 0]
    if (present < 2).any():
        raise DataError("every class needs >= 2 training samples for the inner split")

    inner_train, inner_val = stratified_split(
        train,
        SplitSpec(
            test_fraction=cfg.inner_val_fraction,
            stratified=True,
            seed=derive_seed(cfg.seed, "stack/inner_split"),
        ),
    )
    val_counts = np.bincount(inner_val.y, minlength=train.n_classes)
    if ((counts > 0) & (val_counts == 0)).any():
        raise DataError(
            "a class is absent from the inner validation split; use a larger "
            "inner_val_fraction or more training data"
        )

    if bases is None:
        bases = [
            make_learner(name, params, seed=derive_seed(cfg.seed, f"stack/base{i}/{name}"))
            for i, (name, params) in enumerate(cfg.base_specs)
        ]
    for model in bases:
        model.fit(inner_train.X, inner_train.y, n_classes=train.n_classes)

    width = train.n_classes if cfg.meta_feature_kind == "probabilities" else 1
    meta_X = np.hstack(
        [
            model.predict_proba(inner_val.X)
            if cfg.meta_feature_kind == "probabilities"
            else np.argmax(model.predict_proba(inner_val.X), axis=1)[:, None].astype(
                np.float64
            )
            for model in bases
        ]
    )
    assert meta_X.shape[1] == len(bases) * width
    meta = GbdtClassifier(
        **{"seed": derive_seed(cfg.seed, "stack/meta"), **cfg.meta_params}
    )
    meta.fit(meta_X, inner_val.y, n_classes=train.n_classes)

    if cfg.refit_bases:
        for model in bases:
            model.fit(train.X, train.y, n_classes=train.n_classes)

    return StackModel(
        base_models=list(bases),
        meta_model=meta,
        meta_feature_kind=cfg.meta_feature_kind,
        n_classes=train.n_classes,
        n_features=train.n_features,
        provenance={
            "seed": cfg.seed,
            "inner_val_fraction": cfg.inner_val_fraction,
            "inner_train_rows": inner_train.n_rows,
            "inner_val_rows": inner_val.n_rows,
            "refit_bases": cfg.refit_bases,
            "base_specs": [list(s) for s in cfg.base_specs],
        },
    )


def predict_stack(model: StackModel, X: np.ndarray) -> np.ndarray:
    return model.predict_proba(X)


def serialize_stack(model: StackModel) -> bytes:
    arrays = {"meta_model": np.frombuffer(serialize_model(model.meta_model), dtype=np.uint8)}
    for i, base in enumerate(model.base_models):
        arrays[f"base{i}"] = np.frombuffer(serialize_model(base), dtype=np.uint8)
    meta = {
        "meta_feature_kind": model.meta_feature_kind,
        "n_classes": model.n_classes,
        "n_features": model.n_features,
        "n_bases": len(model.base_models),
        "provenance": model.provenance,
    }
    return write_container("stack", meta, arrays)


def deserialize_stack(data: bytes) -> StackModel:
    tag, meta, arrays = read_container(data)
    if tag != "stack":
        raise DataError(f"expected a stack container, got {tag!r}")
    return StackModel(
        base_models=[
            deserialize_model(arrays[f"base{i}"].tobytes())
            for i in range(meta["n_bases"])
        ],
        meta_model=deserialize_model(arrays["meta_model"].tobytes()),
        meta_feature_kind=meta["meta_feature_kind"],
        n_classes=meta["n_classes"],
        n_features=meta["n_features"],
        provenance=meta["provenance"],
    )


def save_stack(model: StackModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_stack(model))


def load_stack(path) -> StackModel:
    with open(path, "rb") as fh:
        return deserialize_stack(fh.read())
