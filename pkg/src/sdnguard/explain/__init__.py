"""Shapley-value explanations: TreeSHAP for tree models, Kernel SHAP for
the stacking ensemble, exact enumeration as oracle, and summary tables."""

import numpy as np

from ..dataset import Dataset
from ..rng import derive_seed
from .attribution import ShapAttribution, ShapSummary, summarize
from .exact import exact_shapley, interventional_value_fn, shapley_from_value_function
from .kernelshap import kernel_shap
from .treeshap import (
    shap_values_tree,
    tree_conditional_expectation,
    tree_expected_value,
    tree_shap,
)


def stratified_background(ds: Dataset, size: int = 100, seed: int = 0) -> np.ndarray:
    """Class-stratified background sample of the training data."""
    rng = np.random.default_rng(seed)
    counts = ds.class_counts()
    present = np.flatnonzero(counts)
    per_class = np.maximum(
        (size * counts[present] / counts[present].sum()).astype(int), 1
    )
    rows = []
    for c, m in zip(present, per_class):
        idx = np.flatnonzero(ds.y == c)
        rows.append(rng.choice(idx, size=min(m, idx.size), replace=False))
    return ds.X[np.sort(np.concatenate(rows))]


def kernel_shap_explain(
    predict_proba_fn,
    X: np.ndarray,
    background: np.ndarray,
    n_coalitions: int | None = None,
    seed: int = 0,
) -> ShapAttribution:
    """Kernel SHAP over a batch of samples against a black-box probability
    function (used for the stacking ensemble's end-to-end predict path)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    values = []
    base = None
    for i in range(X.shape[0]):
        phi, b, _ = kernel_shap(
            predict_proba_fn,
            X[i],
            background,
            n_coalitions=n_coalitions,
            seed=derive_seed(seed, f"kernel_shap/{i}"),
        )
        values.append(phi)
        base = b
    output = np.atleast_2d(predict_proba_fn(X))
    return ShapAttribution(
        values=np.stack(values),
        base_values=base,
        model_output=output,
        output_space="probability",
        tolerance=1e-2 if n_coalitions is not None else 1e-6,
    )


__all__ = [
    "ShapAttribution",
    "ShapSummary",
    "exact_shapley",
    "interventional_value_fn",
    "kernel_shap",
    "kernel_shap_explain",
    "shap_values_tree",
    "shapley_from_value_function",
    "stratified_background",
    "summarize",
    "tree_conditional_expectation",
    "tree_expected_value",
    "tree_shap",
]
