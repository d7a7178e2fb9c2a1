from .base import Classifier
from .forest import ExtraTreesClassifier, RandomForestClassifier
from .gbdt import GbdtClassifier
from .io import deserialize_model, load_model, save_model, serialize_model
from .knn import KnnClassifier
from .mlp import MlpClassifier
from .tree import DecisionTreeClassifier, Tree

LEARNERS = {
    "decision_tree": DecisionTreeClassifier,
    "extra_trees": ExtraTreesClassifier,
    "random_forest": RandomForestClassifier,
    "knn": KnnClassifier,
    "mlp": MlpClassifier,
    "gbdt": GbdtClassifier,
}


def make_learner(name: str, params: dict | None = None, seed: int | None = None):
    from ..errors import UsageError

    if name not in LEARNERS:
        raise UsageError(
            f"unknown model {name!r}; valid names: {', '.join(sorted(LEARNERS))}, stack"
        )
    params = dict(params or {})
    if seed is not None and name != "knn":
        params.setdefault("seed", seed)
    return LEARNERS[name](**params)


__all__ = [
    "Classifier",
    "DecisionTreeClassifier",
    "ExtraTreesClassifier",
    "GbdtClassifier",
    "KnnClassifier",
    "LEARNERS",
    "MlpClassifier",
    "RandomForestClassifier",
    "Tree",
    "deserialize_model",
    "load_model",
    "make_learner",
    "save_model",
    "serialize_model",
]
