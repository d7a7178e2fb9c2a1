"""Run configuration: JSON file with defaults, every field overridable on
the command line (command line wins). The validated config is echoed into
every report for provenance."""

import copy
import hashlib
import json

from .errors import UsageError

DEFAULT_CONFIG = {
    "dataset_csv": None,
    "synthetic": None,  # {"n_classes", "n_features", "n_per_class", "class_separation"}
    "output_dir": "out",
    "drop_columns": ["Timestamp"],
    "categorical_columns": ["Flow ID", "Src IP", "Dst IP", "Label"],
    "label_column": "Label",
    "exclude_identifiers": False,
    "fit_scaler_on_all": False,
    "anova_alpha": 0.05,
    "mi_k_features": 15,
    "mi_neighbors": 3,
    "test_fraction": 0.2,
    "resample_target": 30000,
    "seed": 7,
    "threads": 1,
    "learners": {
        "decision_tree": {},
        "extra_trees": {"n_trees": 100},
        "random_forest": {"n_trees": 100},
        "knn": {"k": 5},
        "mlp": {"hidden": [128, 64], "epochs": 30, "batch_size": 256, "lr": 1e-3},
        "gbdt": {"n_rounds": 200, "learning_rate": 0.1, "max_leaves": 31, "reg_lambda": 1.0},
    },
    "stack": {
        "inner_val_fraction": 0.25,
        "meta_feature_kind": "probabilities",
        "refit_bases": True,
        "meta_params": {},
    },
    "crossval_folds": 5,
    "learning_curve_fractions": [0.2, 0.4, 0.6, 0.8, 1.0],
    "explain_samples": 20,
    "explain_background_size": 100,
    "explain_coalitions": None,
}

IDENTIFIER_COLUMNS = ["Flow ID", "Src IP", "Dst IP"]


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path=None, overrides=None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                user = json.load(fh)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from None
        unknown = set(user) - set(DEFAULT_CONFIG)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = _deep_merge(cfg, user)
    for dotted, raw in (overrides or {}).items():
        _apply_override(cfg, dotted, raw)
    validate_config(cfg)
    return cfg


def _apply_override(cfg: dict, dotted: str, raw: str) -> None:
    keys = dotted.split(".")
    node = cfg
    for key in keys[:-1]:
        if key not in node or not isinstance(node[key], dict):
            node[key] = {}
        node = node[key]
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare string
    node[keys[-1]] = value


def validate_config(cfg: dict) -> None:
    if not 0.0 < cfg["test_fraction"] < 1.0:
        raise UsageError("test_fraction must be in (0,1)")
    if cfg["resample_target"] is not None and cfg["resample_target"] < 1:
        raise UsageError("resample_target must be >= 1 or null")
    if cfg["anova_alpha"] is not None and not 0.0 < cfg["anova_alpha"] < 1.0:
        raise UsageError("anova_alpha must be in (0,1) or null")
    if cfg["mi_neighbors"] < 1:
        raise UsageError("mi_neighbors must be >= 1")
    if cfg["dataset_csv"] is None and cfg["synthetic"] is None:
        raise UsageError("config needs either dataset_csv or synthetic")
    if cfg["threads"] is not None and cfg["threads"] < 1:
        raise UsageError("threads must be >= 1")


def content_key(cfg: dict, keys: list[str], extra: str = "") -> str:
    """Stable hash of a config subset plus any extra digest material, used
    for artifact caching."""
    subset = {k: cfg[k] for k in keys}
    blob = json.dumps(subset, sort_keys=True) + extra
    return hashlib.sha256(blob.encode()).hexdigest()
