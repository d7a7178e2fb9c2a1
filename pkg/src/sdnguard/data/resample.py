"""Stratified train/test splitting and hybrid per-class rebalancing."""

import math
from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset
from ..errors import DataError, UsageError


@dataclass
class SplitSpec:
    test_fraction: float = 0.2
    stratified: bool = True
    seed: int = 0


@dataclass
class ResamplePlan:
    target_per_class: int = 30_000
    seed: int = 0


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Per-class split: test count = round_half_up(fraction * count), clamped
    so each class keeps at least one training row; a 2+-row class always
    contributes at least one test row; a singleton goes entirely to train."""
    if not 0.0 < spec.test_fraction < 1.0:
        raise UsageError(f"test_fraction must be in (0,1), got {spec.test_fraction}")
    rng = np.random.default_rng(spec.seed)
    test_parts = []
    train_parts = []
    for c in range(ds.n_classes):
        idx = np.flatnonzero(ds.y == c)
        if idx.size == 0:
            continue
        if not spec.stratified:
            continue
        n_test = _round_half_up(spec.test_fraction * idx.size)
        if idx.size == 1:
            n_test = 0
        else:
            n_test = min(max(n_test, 1), idx.size - 1)
        perm = rng.permutation(idx.size)
        test_parts.append(idx[perm[:n_test]])
        train_parts.append(idx[perm[n_test:]])
    if not spec.stratified:
        n_test = _round_half_up(spec.test_fraction * ds.n_rows)
        perm = rng.permutation(ds.n_rows)
        test_parts = [perm[:n_test]]
        train_parts = [perm[n_test:]]
    test_idx = np.sort(np.concatenate(test_parts))
    train_idx = np.sort(np.concatenate(train_parts))
    return ds.take(train_idx), ds.take(test_idx)


def hybrid_resample(train: Dataset, plan: ResamplePlan) -> Dataset:
    """Resample every present class to exactly target_per_class rows.

    Majority classes are undersampled without replacement; minority classes
    keep every original row at least once and top up by sampling with
    replacement. Output rows are grouped by class id.
    """
    if plan.target_per_class < 1:
        raise UsageError("target_per_class must be >= 1")
    if train.n_rows == 0:
        raise DataError("empty training set")
    rng = np.random.default_rng(plan.seed)
    parts = []
    for c in range(train.n_classes):
        idx = np.flatnonzero(train.y == c)
        if idx.size == 0:
            continue
        t = plan.target_per_class
        if idx.size > t:
            chosen = rng.choice(idx, size=t, replace=False)
        elif idx.size < t:
            extra = rng.choice(idx, size=t - idx.size, replace=True)
            chosen = np.concatenate([idx, extra])
        else:
            chosen = idx
        parts.append(chosen)
    return train.take(np.concatenate(parts))
