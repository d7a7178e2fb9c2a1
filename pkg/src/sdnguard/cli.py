"""Batch CLI wiring the pipeline:

    sdnguard <prepare|select|train|evaluate|crossval|explain|benchmark>
             --config <file> [overrides]

Artifacts and reports land under the configured output directory; every
report echoes the config and isolates its timestamp in one header key
("created_at") so reruns are byte-identical apart from it."""

import argparse
import csv as csv_module
import hashlib
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import IDENTIFIER_COLUMNS, content_key, load_config
from .data import (
    ResamplePlan,
    SplitSpec,
    apply_scaler,
    fit_scaler,
    generate_synthetic,
    hybrid_resample,
    load_csv,
    prepare,
    stratified_split,
)
from .dataset import Dataset, load_dataset, save_dataset
from .errors import DataError, SdnGuardError, UsageError
from .evaluation import (
    benchmark,
    confusion,
    learning_curve,
    metrics,
    roc_and_pr,
    stratified_kfold_cv,
)
from .explain import (
    kernel_shap_explain,
    stratified_background,
    summarize,
    tree_shap,
)
from .learners import (
    DecisionTreeClassifier,
    ExtraTreesClassifier,
    GbdtClassifier,
    RandomForestClassifier,
    deserialize_model,
    load_model,
    make_learner,
    save_model,
)
from .learners.io import read_container
from .rng import derive_seed
from .stacking import StackConfig, StackModel, fit_stack, load_stack, save_stack
from .stats import anova_f, mutual_info, select_k_best

SCHEMA_VERSION = 1
MODEL_NAMES = [
    "decision_tree",
    "extra_trees",
    "random_forest",
    "knn",
    "mlp",
    "gbdt",
    "stack",
]

TREE_MODELS = (
    DecisionTreeClassifier,
    ExtraTreesClassifier,
    RandomForestClassifier,
    GbdtClassifier,
)


def _header(cfg: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "tool_version": __version__,
        "config": cfg,
    }


def _write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(cfg: dict) -> Path:
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _file_digest(path: str) -> str:
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
    except FileNotFoundError:
        raise DataError(f"dataset file not found: {path}") from None
    return h.hexdigest()


# ---------------------------------------------------------------- prepare


PREPARE_KEYS = [
    "dataset_csv",
    "synthetic",
    "drop_columns",
    "categorical_columns",
    "label_column",
    "exclude_identifiers",
    "fit_scaler_on_all",
    "test_fraction",
    "seed",
]


def cmd_prepare(cfg: dict) -> None:
    out = _outdir(cfg)
    extra = _file_digest(cfg["dataset_csv"]) if cfg["dataset_csv"] else ""
    key = content_key(cfg, PREPARE_KEYS, extra)
    manifest_path = out / "manifest.json"
    if manifest_path.exists():
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        if manifest.get("content_key") == key and all(
            (out / f).exists() for f in manifest.get("files", [])
        ):
            print(f"prepare: cached artifacts match content key {key[:12]}, skipping")
            return

    drop_report = None
    if cfg["dataset_csv"]:
        raw = load_csv(cfg["dataset_csv"])
        drop_cols = list(cfg["drop_columns"])
        if cfg["exclude_identifiers"]:
            drop_cols += [c for c in IDENTIFIER_COLUMNS if c in raw.column_names]
        ds, encoding, drop_report = prepare(
            raw,
            drop_cols=drop_cols,
            categorical_cols=cfg["categorical_columns"],
            label_col=cfg["label_column"],
        )
        encoding.save(out / "encoding.json")
    else:
        s = cfg["synthetic"]
        ds = generate_synthetic(
            n_classes=s["n_classes"],
            n_features=s["n_features"],
            n_per_class=s["n_per_class"],
            class_separation=s["class_separation"],
            seed=derive_seed(cfg["seed"], "synthetic"),
        )

    train, test = stratified_split(
        ds,
        SplitSpec(
            test_fraction=cfg["test_fraction"],
            stratified=True,
            seed=derive_seed(cfg["seed"], "split"),
        ),
    )
    scaler = fit_scaler(ds if cfg["fit_scaler_on_all"] else train)
    train = apply_scaler(scaler, train)
    test = apply_scaler(scaler, test)
    save_dataset(train, out / "train.ds")
    save_dataset(test, out / "test.ds")
    scaler.save(out / "scaler.json")

    report = _header(cfg)
    report.update(
        {
            "content_key": key,
            "n_train": train.n_rows,
            "n_test": test.n_rows,
            "n_features": train.n_features,
            "class_names": train.class_names,
            "train_class_counts": train.class_counts().tolist(),
            "test_class_counts": test.class_counts().tolist(),
        }
    )
    if drop_report is not None:
        report["dropped_rows"] = drop_report.n_dropped_rows
        report["input_rows"] = drop_report.n_input_rows
        report["dropped_columns"] = drop_report.dropped_columns
    _write_json(out / "prepare_report.json", report)

    files = ["train.ds", "test.ds", "scaler.json", "prepare_report.json"]
    if cfg["dataset_csv"]:
        files.append("encoding.json")
    _write_json(manifest_path, {"content_key": key, "files": files})
    print(f"prepare: {train.n_rows} train / {test.n_rows} test rows, "
          f"{train.n_features} features, {train.n_classes} classes")


# ----------------------------------------------------------------- select


def cmd_select(cfg: dict) -> None:
    out = _outdir(cfg)
    train = load_dataset(out / "train.ds")
    anova = anova_f(train.X, train.y, feature_names=train.feature_names)
    if cfg["anova_alpha"] is not None:
        insig = set(anova.insignificant(cfg["anova_alpha"]).tolist())
    else:
        insig = set()
    kept = [i for i in range(train.n_features) if i not in insig]
    if cfg["mi_k_features"] > len(kept):
        raise UsageError(
            f"mi_k_features={cfg['mi_k_features']} exceeds the "
            f"{len(kept)} features surviving the ANOVA screen"
        )
    sub = train.select_features(kept)
    scores = mutual_info(
        sub.X,
        sub.y,
        k=cfg["mi_neighbors"],
        seed=derive_seed(cfg["seed"], "mi"),
        feature_names=sub.feature_names,
    )
    selection = select_k_best(scores, cfg["mi_k_features"])

    doc = _header(cfg)
    doc["anova"] = anova.to_json_dict()
    doc["anova_dropped"] = [train.feature_names[i] for i in sorted(insig)]
    doc["mi"] = {
        "n_neighbors": scores.n_neighbors,
        "jitter_seed": scores.jitter_seed,
        "scores": {n: float(s) for n, s in zip(sub.feature_names, scores.scores)},
    }
    doc["selection"] = selection.to_json_dict()
    # indices into the prepared dataset's column order
    doc["selected_indices"] = [kept[i] for i in selection.indices]
    doc["selected_names"] = selection.names
    _write_json(out / "selection.json", doc)
    print(
        f"select: ANOVA dropped {len(insig)} features; "
        f"MI top-{selection.k}: {', '.join(selection.names[:5])}, ..."
    )


def _load_selected(cfg: dict, name: str) -> Dataset:
    out = _outdir(cfg)
    ds = load_dataset(out / name)
    selection_path = out / "selection.json"
    if selection_path.exists():
        with open(selection_path, encoding="utf-8") as fh:
            doc = json.load(fh)
        ds = ds.select_features(doc["selected_indices"])
    return ds


def _balanced_train(cfg: dict) -> Dataset:
    train = _load_selected(cfg, "train.ds")
    if cfg["resample_target"]:
        train = hybrid_resample(
            train,
            ResamplePlan(
                target_per_class=cfg["resample_target"],
                seed=derive_seed(cfg["seed"], "resample"),
            ),
        )
    return train


# ------------------------------------------------------------------ train


def _fit_named(cfg: dict, name: str, ds: Dataset):
    threads = cfg["threads"] or 1
    seed = derive_seed(cfg["seed"], f"train/{name}")
    if name == "stack":
        learners_cfg = cfg["learners"]
        scfg = StackConfig(
            base_specs=(
                ("decision_tree", learners_cfg.get("decision_tree", {})),
                ("extra_trees", learners_cfg.get("extra_trees", {})),
                ("mlp", learners_cfg.get("mlp", {})),
            ),
            meta_params=cfg["stack"].get("meta_params", {}),
            inner_val_fraction=cfg["stack"].get("inner_val_fraction", 0.25),
            meta_feature_kind=cfg["stack"].get("meta_feature_kind", "probabilities"),
            refit_bases=cfg["stack"].get("refit_bases", True),
            seed=seed,
        )
        return fit_stack(ds, scfg)
    if name not in cfg["learners"] and name not in MODEL_NAMES:
        raise UsageError(
            f"unknown model {name!r}; valid names: {', '.join(MODEL_NAMES)}"
        )
    model = make_learner(name, cfg["learners"].get(name, {}), seed=seed)
    if isinstance(model, (ExtraTreesClassifier, RandomForestClassifier)):
        model.fit(ds.X, ds.y, n_classes=ds.n_classes, threads=threads)
    else:
        model.fit(ds.X, ds.y, n_classes=ds.n_classes)
    return model


def _model_path(cfg: dict, name: str) -> Path:
    path = _outdir(cfg) / "models"
    path.mkdir(parents=True, exist_ok=True)
    return path / f"{name}.model"


def _load_any_model(path: Path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except FileNotFoundError:
        raise DataError(
            f"model file not found: {path}; run 'sdnguard train' first"
        ) from None
    tag, _, _ = read_container(data)
    if tag == "stack":
        return load_stack(path)
    return deserialize_model(data)


def cmd_train(cfg: dict, model_name: str) -> None:
    if model_name not in MODEL_NAMES:
        raise UsageError(
            f"unknown model {model_name!r}; valid names: {', '.join(MODEL_NAMES)}"
        )
    train = _balanced_train(cfg)
    t0 = time.perf_counter()
    model = _fit_named(cfg, model_name, train)
    elapsed = time.perf_counter() - t0
    path = _model_path(cfg, model_name)
    if isinstance(model, StackModel):
        save_stack(model, path)
    else:
        save_model(model, path)
    print(f"train: {model_name} fit on {train.n_rows} rows in {elapsed:.2f}s -> {path}")


# --------------------------------------------------------------- evaluate


def cmd_evaluate(cfg: dict, model_name: str, render_svg: bool = False) -> None:
    out = _outdir(cfg)
    model = _load_any_model(_model_path(cfg, model_name))
    test = _load_selected(cfg, "test.ds")
    proba = model.predict_proba(test.X)
    pred = np.argmax(proba, axis=1)
    cm = confusion(test.y, pred, test.n_classes)
    rep = metrics(cm)

    doc = _header(cfg)
    doc["model"] = model_name
    doc["metrics"] = rep.to_json_dict(test.class_names)
    doc["confusion_matrix"] = cm.counts.tolist()

    curves_dir = out / "curves"
    curves_dir.mkdir(parents=True, exist_ok=True)
    curve_files = []
    areas = {}
    for c in range(test.n_classes):
        if (test.y == c).sum() in (0, test.n_rows):
            continue
        roc, pr = roc_and_pr(test.y, proba, c)
        areas[test.class_names[c]] = {"roc_auc": roc.area, "average_precision": pr.area}
        for curve in (roc, pr):
            kind = "roc" if curve.kind == "roc" else "pr"
            path = curves_dir / f"class{c}_{kind}.csv"
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv_module.writer(fh)
                writer.writerow(["x", "y"])
                writer.writerows(curve.points.tolist())
            curve_files.append(path.name)
    doc["curves"] = {"files": sorted(curve_files), "areas": areas}

    train = _balanced_train(cfg)
    lc = learning_curve(
        train,
        lambda ds: _fit_named(cfg, model_name, ds),
        fractions=cfg["learning_curve_fractions"],
        seed=derive_seed(cfg["seed"], "learning_curve"),
    )
    doc["learning_curve"] = {
        "fractions": lc.fractions,
        "train_accuracy": lc.train_accuracy,
        "val_accuracy": lc.val_accuracy,
    }
    _write_json(out / "report.json", doc)
    if render_svg:
        _render_svgs(out, cm, test, proba)
    print(
        f"evaluate: {model_name} accuracy={rep.accuracy:.4f} "
        f"kappa={rep.kappa:.4f} weighted_f1={rep.weighted_f1:.4f}"
    )


def _render_svgs(out: Path, cm, test: Dataset, proba) -> None:
    try:
        import matplotlib

        matplotlib.use("svg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise UsageError("--svg requires matplotlib") from None
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.imshow(cm.counts, cmap="Blues")
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title("confusion matrix")
    for (i, j), v in np.ndenumerate(cm.counts):
        ax.text(j, i, str(v), ha="center", va="center", fontsize=7)
    fig.savefig(out / "confusion_matrix.svg")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 5))
    for c in range(test.n_classes):
        if (test.y == c).sum() in (0, test.n_rows):
            continue
        roc, _ = roc_and_pr(test.y, proba, c)
        ax.plot(roc.points[:, 0], roc.points[:, 1], label=f"class {c} ({roc.area:.3f})")
    ax.plot([0, 1], [0, 1], "k--", lw=0.5)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.legend(fontsize=7)
    fig.savefig(out / "roc_curves.svg")
    plt.close(fig)


# --------------------------------------------------------------- crossval


def cmd_crossval(cfg: dict, model_name: str) -> None:
    out = _outdir(cfg)
    train = _balanced_train(cfg)
    test = _load_selected(cfg, "test.ds")
    report = stratified_kfold_cv(
        train,
        lambda ds: _fit_named(cfg, model_name, ds),
        k=cfg["crossval_folds"],
        seed=derive_seed(cfg["seed"], "crossval"),
        test_set=test,
    )
    doc = _header(cfg)
    doc["model"] = model_name
    doc["crossval"] = {
        "k": report.k,
        "fold_accuracies": report.fold_accuracies,
        "mean_accuracy": report.mean_accuracy,
        "test_kappa": report.test_kappa,
    }
    _write_json(out / "crossval.json", doc)
    print(
        f"crossval: {model_name} mean accuracy {report.mean_accuracy:.4f}, "
        f"test kappa {report.test_kappa:.4f}"
    )


# ---------------------------------------------------------------- explain


def cmd_explain(cfg: dict, model_name: str) -> None:
    out = _outdir(cfg)
    model = _load_any_model(_model_path(cfg, model_name))
    train = _load_selected(cfg, "train.ds")
    test = _load_selected(cfg, "test.ds")
    seed = derive_seed(cfg["seed"], "explain")
    rng = np.random.default_rng(seed)
    n = min(cfg["explain_samples"], test.n_rows)
    sample_idx = np.sort(rng.choice(test.n_rows, size=n, replace=False))
    X = test.X[sample_idx]

    if isinstance(model, TREE_MODELS):
        attr = tree_shap(model, X)
    else:
        background = stratified_background(
            train, size=cfg["explain_background_size"], seed=seed
        )
        attr = kernel_shap_explain(
            model.predict_proba,
            X,
            background,
            n_coalitions=cfg["explain_coalitions"],
            seed=seed,
        )
    summary = summarize(attr, feature_names=test.feature_names)

    doc = _header(cfg)
    doc["model"] = model_name
    doc["output_space"] = attr.output_space
    doc["base_values"] = attr.base_values.tolist()
    doc["sample_indices"] = sample_idx.tolist()
    doc["attributions"] = attr.values.tolist()
    doc["summary"] = summary.to_json_dict()
    _write_json(out / "shap.json", doc)

    with open(out / "shap_summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv_module.writer(fh)
        writer.writerow(["feature", "class", "mean_abs_value"])
        for i in summary.global_order:
            for c, cname in enumerate(test.class_names):
                writer.writerow(
                    [summary.feature_names[i], cname, f"{summary.mean_abs[i, c]:.10g}"]
                )
    top = [summary.feature_names[i] for i in summary.global_order[:4]]
    print(f"explain: {model_name} over {n} samples; global top features: {', '.join(top)}")


# -------------------------------------------------------------- benchmark


def cmd_benchmark(cfg: dict) -> None:
    out = _outdir(cfg)
    train = _balanced_train(cfg)
    times = benchmark(
        {name: (lambda ds, n=name: _fit_named(cfg, n, ds)) for name in MODEL_NAMES},
        train,
    )
    doc = _header(cfg)
    doc["fit_seconds"] = times
    doc["n_rows"] = train.n_rows
    _write_json(out / "benchmark.json", doc)
    for name, t in times.items():
        print(f"benchmark: {name:15s} {t:8.3f}s")


# ------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdnguard",
        description="SDN intrusion-detection pipeline: preprocessing, feature "
        "selection, stacking ensemble, evaluation, and SHAP explanations.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            dest="overrides",
            help="override a config field (dotted path, JSON value)",
        )
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--output-dir", help="artifact directory")
        p.add_argument("--dataset", help="input CSV path")
        p.add_argument("--threads", type=int, help="worker thread cap")

    p = sub.add_parser("prepare", help="ingest, encode, scale, split")
    common(p)
    p.add_argument("--fit-on-all", action="store_true",
                   help="fit the scaler on the full dataset (leaky variant)")
    p.add_argument("--exclude-identifiers", action="store_true",
                   help="drop Flow ID / Src IP / Dst IP columns")

    p = sub.add_parser("select", help="ANOVA screen + MI top-k selection")
    common(p)

    for name, needs_model in [
        ("train", True),
        ("evaluate", True),
        ("crossval", True),
        ("explain", True),
    ]:
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--model", default="stack", help=f"one of {', '.join(MODEL_NAMES)}")
        if name == "evaluate":
            p.add_argument("--svg", action="store_true", help="render SVG figures")

    p = sub.add_parser("benchmark", help="fit-time table for all models")
    common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {}
        for item in args.overrides:
            if "=" not in item:
                raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            overrides[key] = value
        if args.seed is not None:
            overrides["seed"] = str(args.seed)
        if args.output_dir is not None:
            overrides["output_dir"] = json.dumps(args.output_dir)
        if args.dataset is not None:
            overrides["dataset_csv"] = json.dumps(args.dataset)
        if args.threads is not None:
            overrides["threads"] = str(args.threads)
        if getattr(args, "fit_on_all", False):
            overrides["fit_scaler_on_all"] = "true"
        if getattr(args, "exclude_identifiers", False):
            overrides["exclude_identifiers"] = "true"
        cfg = load_config(args.config, overrides)

        if args.command == "prepare":
            cmd_prepare(cfg)
        elif args.command == "select":
            cmd_select(cfg)
        elif args.command == "train":
            cmd_train(cfg, args.model)
        elif args.command == "evaluate":
            cmd_evaluate(cfg, args.model, render_svg=args.svg)
        elif args.command == "crossval":
            cmd_crossval(cfg, args.model)
        elif args.command == "explain":
            cmd_explain(cfg, args.model)
        elif args.command == "benchmark":
            cmd_benchmark(cfg)
        return 0
    except SdnGuardError as exc:
        print(f"sdnguard: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
