"""Attribution containers with the local-accuracy axiom enforced on build."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericalError


@dataclass
class ShapAttribution:
    values: np.ndarray  # (n, d, C)
    base_values: np.ndarray  # (C,)
    model_output: np.ndarray  # (n, C), in the explained output space
    output_space: str  # "probability" | "margin"
    tolerance: float

    def __post_init__(self):
        recon = self.base_values[None, :] + self.values.sum(axis=1)
        err = np.abs(recon - self.model_output).max(initial=0.0)
        if err > self.tolerance:
            raise NumericalError(
                f"local accuracy violated: max error {err:.3e} > {self.tolerance:.3e}"
            )

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


@dataclass
class ShapSummary:
    mean_abs: np.ndarray  # (d, C)
    feature_names: list[str]
    global_order: list[int]  # descending summed mean-|value|, ties by index

    def to_json_dict(self) -> dict:
        return {
            "features": [
                {
                    "index": i,
                    "name": self.feature_names[i],
                    "mean_abs_by_class": self.mean_abs[i].tolist(),
                    "total": float(self.mean_abs[i].sum()),
                }
                for i in self.global_order
            ]
        }


def summarize(attr: ShapAttribution, feature_names=None) -> ShapSummary:
    mean_abs = np.abs(attr.values).mean(axis=0)  # (d, C)
    d = mean_abs.shape[0]
    names = list(feature_names) if feature_names else [f"f{i}" for i in range(d)]
    totals = mean_abs.sum(axis=1)
    order = sorted(range(d), key=lambda i: (-totals[i], i))
    return ShapSummary(mean_abs=mean_abs, feature_names=names, global_order=order)
