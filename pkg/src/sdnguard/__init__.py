"""sdnguard: explainable stacking-ensemble intrusion detection for SDN
flow records — preprocessing, statistical feature selection, six
from-scratch classifiers, holdout stacking with a gradient-boosted
meta-learner, multi-metric evaluation, and Shapley-value explanations."""

from ._kernels import BACKEND as kernel_backend
from .dataset import Dataset, load_dataset, save_dataset

__version__ = "0.1.0"

__all__ = ["Dataset", "kernel_backend", "load_dataset", "save_dataset", "__version__"]
