"""One versioned binary container for every fitted model.

Layout (little-endian, documented in docs/formats.md):

    magic    4 bytes  b"SGML"
    version  u32
    tag      u16 length + UTF-8 model type tag
    meta     u32 length + UTF-8 JSON (hyperparameters, dims, seed)
    n_arrays u32
    per array: u16 name length + name, u8 dtype code, u8 ndim,
               ndim x u64 shape, raw array bytes

Loading reproduces bit-identical predictions because all numeric state is
stored exactly.
"""

import io
import json
import struct

import numpy as np

from ..errors import DataError
from .forest import ExtraTreesClassifier, RandomForestClassifier
from .gbdt import GbdtClassifier
from .knn import KnnClassifier
from .mlp import MlpClassifier
from .tree import DecisionTreeClassifier, Tree

MAGIC = b"SGML"
VERSION = 1

_DTYPES = {0: "<f8", 1: "<i8", 2: "|u1", 3: "<i4"}
_DTYPE_CODES = {np.dtype(v): k for k, v in _DTYPES.items()}


def write_container(type_tag: str, meta: dict, arrays: dict[str, np.ndarray]) -> bytes:
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<I", VERSION))
    tag = type_tag.encode()
    buf.write(struct.pack("<H", len(tag)))
    buf.write(tag)
    meta_b = json.dumps(meta, sort_keys=True).encode()
    buf.write(struct.pack("<I", len(meta_b)))
    buf.write(meta_b)
    buf.write(struct.pack("<I", len(arrays)))
    for name, arr in arrays.items():
        arr = np.asarray(arr)
        code = _DTYPE_CODES[np.dtype(arr.dtype.str.replace(">", "<"))]
        name_b = name.encode()
        buf.write(struct.pack("<H", len(name_b)))
        buf.write(name_b)
        buf.write(struct.pack("<BB", code, arr.ndim))
        for s in arr.shape:
            buf.write(struct.pack("<Q", s))
        buf.write(np.ascontiguousarray(arr).astype(_DTYPES[code]).tobytes())
    return buf.getvalue()


def read_container(data: bytes):
    buf = io.BytesIO(data)
    if buf.read(4) != MAGIC:
        raise DataError("not a model container")
    (version,) = struct.unpack("<I", buf.read(4))
    if version != VERSION:
        raise DataError(f"unsupported model container version {version}")
    (tag_len,) = struct.unpack("<H", buf.read(2))
    tag = buf.read(tag_len).decode()
    (meta_len,) = struct.unpack("<I", buf.read(4))
    meta = json.loads(buf.read(meta_len))
    (n_arrays,) = struct.unpack("<I", buf.read(4))
    arrays = {}
    for _ in range(n_arrays):
        (name_len,) = struct.unpack("<H", buf.read(2))
        name = buf.read(name_len).decode()
        code, ndim = struct.unpack("<BB", buf.read(2))
        shape = struct.unpack(f"<{ndim}Q", buf.read(8 * ndim)) if ndim else ()
        dtype = np.dtype(_DTYPES[code])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(buf.read(count * dtype.itemsize), dtype=dtype)
        arrays[name] = arr.reshape(shape).copy()
    return tag, meta, arrays


def _tree_arrays(prefix: str, tree: Tree) -> dict:
    return {
        f"{prefix}feature": tree.feature,
        f"{prefix}threshold": tree.threshold,
        f"{prefix}left": tree.left,
        f"{prefix}right": tree.right,
        f"{prefix}cover": tree.cover,
        f"{prefix}value": tree.value,
    }


def _tree_from(prefix: str, arrays: dict) -> Tree:
    return Tree(
        feature=arrays[f"{prefix}feature"],
        threshold=arrays[f"{prefix}threshold"],
        left=arrays[f"{prefix}left"],
        right=arrays[f"{prefix}right"],
        cover=arrays[f"{prefix}cover"],
        value=arrays[f"{prefix}value"],
    )


def serialize_model(model) -> bytes:
    meta = {"n_features": model.n_features, "n_classes": model.n_classes}
    if isinstance(model, DecisionTreeClassifier):
        meta.update(
            max_depth=model.max_depth,
            min_samples_split=model.min_samples_split,
            min_impurity_decrease=model.min_impurity_decrease,
            seed=model.seed,
        )
        return write_container("decision_tree", meta, _tree_arrays("", model.tree_))
    if isinstance(model, (ExtraTreesClassifier, RandomForestClassifier)):
        tag = "extra_trees" if isinstance(model, ExtraTreesClassifier) else "random_forest"
        meta.update(
            n_trees=model.n_trees,
            max_depth=model.max_depth,
            feature_subsample=model.feature_subsample,
            seed=model.seed,
        )
        arrays = {}
        for i, tree in enumerate(model.trees_):
            arrays.update(_tree_arrays(f"tree{i}/", tree))
        return write_container(tag, meta, arrays)
    if isinstance(model, KnnClassifier):
        meta.update(k=model.k, chunk_size=model.chunk_size, seed=model.seed)
        return write_container("knn", meta, {"X": model.X_, "y": model.y_})
    if isinstance(model, MlpClassifier):
        meta.update(
            hidden=list(model.hidden),
            epochs=model.epochs,
            batch_size=model.batch_size,
            lr=model.lr,
            adam_betas=list(model.adam_betas),
            l2=model.l2,
            seed=model.seed,
        )
        arrays = {}
        for i, (W, b) in enumerate(zip(model.weights_, model.biases_)):
            arrays[f"W{i}"] = W
            arrays[f"b{i}"] = b
        return write_container("mlp", meta, arrays)
    if isinstance(model, GbdtClassifier):
        meta.update(
            n_rounds=model.n_rounds,
            learning_rate=model.learning_rate,
            max_leaves=model.max_leaves,
            min_child_weight=model.min_child_weight,
            reg_lambda=model.reg_lambda,
            n_bins=model.n_bins,
            seed=model.seed,
            fitted_rounds=len(model.trees_),
        )
        arrays = {"base_score": model.base_score_}
        for r, round_trees in enumerate(model.trees_):
            for c, tree in enumerate(round_trees):
                arrays.update(_tree_arrays(f"t{r}_{c}/", tree))
        return write_container("gbdt", meta, arrays)
    raise DataError(f"cannot serialize model of type {type(model).__name__}")


def deserialize_model(data: bytes):
    tag, meta, arrays = read_container(data)
    n_features = meta["n_features"]
    n_classes = meta["n_classes"]
    if tag == "decision_tree":
        model = DecisionTreeClassifier(
            max_depth=meta["max_depth"],
            min_samples_split=meta["min_samples_split"],
            min_impurity_decrease=meta["min_impurity_decrease"],
            seed=meta["seed"],
        )
        model.tree_ = _tree_from("", arrays)
    elif tag in ("extra_trees", "random_forest"):
        cls = ExtraTreesClassifier if tag == "extra_trees" else RandomForestClassifier
        model = cls(
            n_trees=meta["n_trees"],
            max_depth=meta["max_depth"],
            feature_subsample=meta["feature_subsample"],
            seed=meta["seed"],
        )
        model.trees_ = [_tree_from(f"tree{i}/", arrays) for i in range(meta["n_trees"])]
    elif tag == "knn":
        model = KnnClassifier(k=meta["k"], chunk_size=meta["chunk_size"], seed=meta["seed"])
        model.X_ = arrays["X"]
        model.y_ = arrays["y"]
    elif tag == "mlp":
        model = MlpClassifier(
            hidden=meta["hidden"],
            epochs=meta["epochs"],
            batch_size=meta["batch_size"],
            lr=meta["lr"],
            adam_betas=tuple(meta["adam_betas"]),
            l2=meta["l2"],
            seed=meta["seed"],
        )
        i = 0
        while f"W{i}" in arrays:
            model.weights_.append(arrays[f"W{i}"])
            model.biases_.append(arrays[f"b{i}"])
            i += 1
    elif tag == "gbdt":
        model = GbdtClassifier(
            n_rounds=meta["n_rounds"],
            learning_rate=meta["learning_rate"],
            max_leaves=meta["max_leaves"],
            min_child_weight=meta["min_child_weight"],
            reg_lambda=meta["reg_lambda"],
            n_bins=meta["n_bins"],
            seed=meta["seed"],
        )
        model.base_score_ = arrays["base_score"]
        model.trees_ = [
            [_tree_from(f"t{r}_{c}/", arrays) for c in range(n_classes)]
            for r in range(meta["fitted_rounds"])
        ]
    else:
        raise DataError(f"unknown model type tag {tag!r}")
    model.n_features = n_features
    model.n_classes = n_classes
    return model


def save_model(model, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_model(model))


def load_model(path):
    with open(path, "rb") as fh:
        return deserialize_model(fh.read())
