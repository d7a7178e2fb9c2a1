"""Everything behind the result tables: confusion matrix, multi-metric
report, one-vs-rest ROC/PR curves, stratified k-fold CV, learning curves,
and fit-time benchmarking."""

import time
from dataclasses import dataclass, field

import numpy as np

from .data.resample import SplitSpec, stratified_split
from .dataset import Dataset
from .errors import DataError, UsageError


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # (C, C), rows = true, cols = predicted

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class MetricsReport:
    accuracy: float
    precision: np.ndarray  # per class
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    kappa: float
    zero_division_flags: list[str] = field(default_factory=list)

    def to_json_dict(self, class_names=None) -> dict:
        names = class_names or [str(i) for i in range(len(self.support))]
        return {
            "accuracy": self.accuracy,
            "weighted": {
                "precision": self.weighted_precision,
                "recall": self.weighted_recall,
                "f1": self.weighted_f1,
            },
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
            "kappa": self.kappa,
            "per_class": [
                {
                    "class": names[c],
                    "precision": float(self.precision[c]),
                    "recall": float(self.recall[c]),
                    "f1": float(self.f1[c]),
                    "support": int(self.support[c]),
                }
                for c in range(len(self.support))
            ],
            "zero_division_flags": self.zero_division_flags,
        }


@dataclass
class CurveData:
    kind: str  # "roc" | "precision_recall"
    points: np.ndarray  # (m, 2) of (x, y)
    area: float


@dataclass
class CvReport:
    fold_accuracies: list[float]
    mean_accuracy: float
    test_kappa: float | None
    k: int
    seed: int


@dataclass
class LearningCurve:
    fractions: list[float]
    train_accuracy: list[float]
    val_accuracy: list[float]


def confusion(y_true, y_pred, n_classes: int) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise DataError("y_true and y_pred lengths differ")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts=counts)


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    counts = cm.counts.astype(np.float64)
    n = counts.sum()
    if n == 0:
        raise DataError("empty confusion matrix")
    tp = np.diag(counts)
    pred_tot = counts.sum(axis=0)
    true_tot = counts.sum(axis=1)
    flags = []
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(pred_tot > 0, tp / pred_tot, 0.0)
        recall = np.where(true_tot > 0, tp / true_tot, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2 * precision * recall / np.where(pr > 0, pr, 1), 0.0)
    for c in range(cm.n_classes):
        if pred_tot[c] == 0:
            flags.append(f"precision undefined for class {c} (no predictions)")
        if true_tot[c] == 0:
            flags.append(f"recall undefined for class {c} (no support)")
    w = true_tot / n
    p_o = tp.sum() / n
    p_e = float((true_tot * pred_tot).sum()) / (n * n)
    kappa = 1.0 if p_e == 1.0 else (p_o - p_e) / (1.0 - p_e)
    present = true_tot > 0
    return MetricsReport(
        accuracy=float(p_o),
        precision=precision,
        recall=recall,
        f1=f1,
        support=true_tot.astype(np.int64),
        weighted_precision=float((w * precision).sum()),
        weighted_recall=float((w * recall).sum()),
        weighted_f1=float((w * f1).sum()),
        macro_precision=float(precision[present].mean()),
        macro_recall=float(recall[present].mean()),
        macro_f1=float(f1[present].mean()),
        kappa=float(kappa),
        zero_division_flags=flags,
    )


def roc_curve(y_true, scores, positive_class: int) -> CurveData:
    """One-vs-rest ROC by threshold sweep over sorted unique scores;
    trapezoidal AUC; tied scores grouped (average-rank treatment)."""
    pos = np.asarray(y_true) == positive_class
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(pos.sum())
    n_neg = pos.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC needs both positive and negative samples")
    order = np.argsort(-scores, kind="stable")
    pos_sorted = pos[order]
    s_sorted = scores[order]
    tps = np.cumsum(pos_sorted)
    fps = np.cumsum(~pos_sorted)
    # keep only the last entry of each tied-score run
    last = np.r_[s_sorted[1:] != s_sorted[:-1], True]
    tpr = np.r_[0.0, tps[last] / n_pos]
    fpr = np.r_[0.0, fps[last] / n_neg]
    auc = float(np.trapezoid(tpr, fpr))
    return CurveData(kind="roc", points=np.column_stack([fpr, tpr]), area=auc)


def pr_curve(y_true, scores, positive_class: int) -> CurveData:
    """Precision-recall curve; area is step-wise average precision."""
    pos = np.asarray(y_true) == positive_class
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(pos.sum())
    if n_pos == 0:
        raise DataError("PR curve needs positive samples")
    order = np.argsort(-scores, kind="stable")
    pos_sorted = pos[order]
    s_sorted = scores[order]
    tps = np.cumsum(pos_sorted)
    preds = np.arange(1, pos.size + 1)
    last = np.r_[s_sorted[1:] != s_sorted[:-1], True]
    precision = tps[last] / preds[last]
    recall = tps[last] / n_pos
    ap = float(np.sum(np.diff(np.r_[0.0, recall]) * precision))
    points = np.column_stack([np.r_[0.0, recall], np.r_[1.0, precision]])
    return CurveData(kind="precision_recall", points=points, area=ap)


def roc_and_pr(y_true, proba, positive_class: int) -> tuple[CurveData, CurveData]:
    scores = np.asarray(proba)[:, positive_class]
    return roc_curve(y_true, scores, positive_class), pr_curve(
        y_true, scores, positive_class
    )


def stratified_kfold_indices(y, k, seed, n_classes):
    """Deterministic stratified fold assignment per row."""
    rng = np.random.default_rng(seed)
    assign = np.empty(len(y), dtype=np.int64)
    for c in range(n_classes):
        idx = np.flatnonzero(np.asarray(y) == c)
        perm = rng.permutation(idx.size)
        assign[idx[perm]] = np.arange(idx.size) % k
    return assign


def stratified_kfold_cv(
    ds: Dataset, fit_fn, k: int = 5, seed: int = 0, test_set: Dataset | None = None
) -> CvReport:
    """fit_fn(train_ds) -> fitted model with predict(X). Reports per-fold
    validation accuracy; if a held-out test set is given, also Cohen's kappa
    of a full-train fit evaluated on it."""
    if k < 2:
        raise UsageError("k must be >= 2")
    assign = stratified_kfold_indices(ds.y, k, seed, ds.n_classes)
    accs = []
    for fold in range(k):
        val_idx = np.flatnonzero(assign == fold)
        train_idx = np.flatnonzero(assign != fold)
        model = fit_fn(ds.take(train_idx))
        pred = model.predict(ds.X[val_idx])
        accs.append(float((pred == ds.y[val_idx]).mean()))
    test_kappa = None
    if test_set is not None:
        model = fit_fn(ds)
        cm = confusion(test_set.y, model.predict(test_set.X), ds.n_classes)
        test_kappa = metrics(cm).kappa
    return CvReport(
        fold_accuracies=accs,
        mean_accuracy=float(np.mean(accs)),
        test_kappa=test_kappa,
        k=k,
        seed=seed,
    )


def learning_curve(
    ds: Dataset, fit_fn, fractions, seed: int = 0, val_fraction: float = 0.25
) -> LearningCurve:
    fractions = list(fractions)
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise UsageError("fractions must lie in (0, 1]")
    if sorted(fractions) != fractions or len(set(fractions)) != len(fractions):
        raise UsageError("fractions must be strictly increasing")
    train, val = stratified_split(
        ds, SplitSpec(test_fraction=val_fraction, stratified=True, seed=seed)
    )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(train.n_rows)
    train_accs = []
    val_accs = []
    for f in fractions:
        m = max(int(round(f * train.n_rows)), ds.n_classes)
        sub = train.take(np.sort(perm[:m]))
        model = fit_fn(sub)
        train_accs.append(float((model.predict(sub.X) == sub.y).mean()))
        val_accs.append(float((model.predict(val.X) == val.y).mean()))
    return LearningCurve(
        fractions=fractions, train_accuracy=train_accs, val_accuracy=val_accs
    )


def benchmark(fit_fns: dict, ds: Dataset) -> dict[str, float]:
    """Wall-clock fit seconds per named learner on this machine."""
    times = {}
    for name, fit_fn in fit_fns.items():
        t0 = time.perf_counter()
        fit_fn(ds)
        times[name] = time.perf_counter() - t0
    return times
