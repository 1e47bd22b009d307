"""Save and load trained models as self-describing JSON bundles.

A bundle is an 8-byte magic line ``#bnl-v1\\n`` followed by one
canonical JSON document (sorted keys, compact separators, no NaN or
Infinity literals).  Canonical form makes saving the same bundle twice
byte-identical.  Bundles are pure data: loading never executes code,
and every structural invariant is re-checked so a tampered file is
rejected with the first offending field named.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .dataset import FEATURE_COLUMNS, IMPUTABLE_COLUMNS, STRATEGIES, PreprocessParams
from .models import ForestModel, KernelSpec, KnnModel, SvrModel
from .models.forest import Tree

MAGIC = b"#bnl-v1\n"
FORMAT_VERSION = 1
BUNDLE_SUFFIX = ".bnl.json"

MODEL_KIND_BY_TYPE = {SvrModel: "Svr", ForestModel: "Forest", KnnModel: "Knn"}
TRAINING_META_KEYS = ("n_rows", "mean_cv_r2", "c", "epsilon", "gamma", "seed")


class BundleError(ValueError):
    """Raised when a file is not a valid model bundle."""


def _utc_now_iso() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def model_dim(model: SvrModel | ForestModel | KnnModel) -> int:
    if isinstance(model, SvrModel):
        return int(model.support_vectors.shape[1])
    if isinstance(model, ForestModel):
        return model.n_features
    return int(model.features.shape[1])


@dataclass(frozen=True, slots=True)
class Bundle:
    """One trained model plus the preprocessing that feeds it.

    created_at is fixed when the bundle object is built, not at save
    time, so saving the same bundle twice stays byte-identical.
    """

    model: SvrModel | ForestModel | KnnModel
    preprocess: PreprocessParams
    training_meta: dict
    created_at: str = field(default_factory=_utc_now_iso)

    @property
    def model_kind(self) -> str:
        return MODEL_KIND_BY_TYPE[type(self.model)]


def _floats(values: np.ndarray) -> list[float]:
    return [float(v) for v in np.asarray(values).ravel()]


def _matrix(values: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(values)]


def _nullable_floats(values: np.ndarray) -> list[float | None]:
    return [None if math.isnan(v) else float(v) for v in np.asarray(values)]


def _svr_payload(model: SvrModel) -> dict:
    return {
        "n_features": int(model.support_vectors.shape[1]),
        "support_vectors": _matrix(model.support_vectors),
        "dual_coefs": _floats(model.dual_coefs),
        "bias": float(model.bias),
        "kernel": {"kind": model.kernel.kind, "gamma": model.kernel.gamma},
        "c": float(model.c),
        "epsilon": float(model.epsilon),
    }


def _forest_payload(model: ForestModel) -> dict:
    return {
        "n_features": model.n_features,
        "n_trees": model.n_trees,
        "max_depth": model.max_depth,
        "min_samples_leaf": model.min_samples_leaf,
        "max_features": model.max_features,
        "seed": model.seed,
        "bootstrap": model.bootstrap,
        "trees": [
            {
                "feature": [int(v) for v in t.feature],
                "threshold": _nullable_floats(t.threshold),
                "left": [int(v) for v in t.left],
                "right": [int(v) for v in t.right],
                "value": _nullable_floats(t.value),
            }
            for t in model.trees
        ],
    }


def _knn_payload(model: KnnModel) -> dict:
    return {
        "n_features": int(model.features.shape[1]),
        "features": _matrix(model.features),
        "targets": _floats(model.targets),
        "k": model.k,
    }


def save_bundle(bundle: Bundle, path: str | Path) -> None:
    """Write one canonical bundle file; the path must end in .bnl.json."""
    target = Path(path)
    if not target.name.endswith(BUNDLE_SUFFIX):
        raise BundleError(f"bundle path must end with {BUNDLE_SUFFIX!r}")
    dim = model_dim(bundle.model)
    if dim != len(bundle.preprocess.feature_means) or dim != len(FEATURE_COLUMNS):
        raise BundleError(
            f"model expects {dim} features but preprocessing provides {len(FEATURE_COLUMNS)}"
        )
    _read_training_meta(bundle.training_meta)
    _read_created_at(bundle.created_at)
    payload_by_kind = {
        "Svr": _svr_payload,
        "Forest": _forest_payload,
        "Knn": _knn_payload,
    }
    kind = bundle.model_kind
    document = {
        "format_version": FORMAT_VERSION,
        "created_at": bundle.created_at,
        "model_kind": kind,
        "model": payload_by_kind[kind](bundle.model),  # type: ignore[operator]
        "preprocess": {
            "strategy": bundle.preprocess.strategy,
            "medians": {k: float(v) for k, v in sorted(bundle.preprocess.medians.items())},
            "feature_columns": list(FEATURE_COLUMNS),
            "feature_means": [float(v) for v in bundle.preprocess.feature_means],
            "feature_sds": [float(v) for v in bundle.preprocess.feature_sds],
        },
        "training_meta": bundle.training_meta,
    }
    try:
        body = json.dumps(document, sort_keys=True, separators=(",", ":"), allow_nan=False)
    except (TypeError, ValueError) as exc:
        raise BundleError(f"bundle is not JSON-serializable: {exc}") from exc
    target.write_bytes(MAGIC + body.encode("utf-8") + b"\n")


def _need(mapping: Any, key: str, where: str) -> Any:
    if not isinstance(mapping, dict) or key not in mapping:
        raise BundleError(f"field {where + key!r}: missing")
    return mapping[key]


def _as_float(value: Any, where: str, allow_none: bool = False) -> float | None:
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise BundleError(f"field {where!r}: expected a number")
    out = float(value)
    if not math.isfinite(out):
        raise BundleError(f"field {where!r}: must be finite")
    return out


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise BundleError(f"field {where!r}: expected an integer")
    return value


def _float_array(value: Any, where: str, length: int | None = None) -> np.ndarray:
    if not isinstance(value, list):
        raise BundleError(f"field {where!r}: expected a list")
    if length is not None and len(value) != length:
        raise BundleError(f"field {where!r}: expected length {length}")
    out = np.empty(len(value), dtype=np.float64)
    for i, v in enumerate(value):
        out[i] = _as_float(v, f"{where}[{i}]")
    return out


def _float_matrix(value: Any, where: str, width: int) -> np.ndarray:
    if not isinstance(value, list):
        raise BundleError(f"field {where!r}: expected a list of rows")
    out = np.empty((len(value), width), dtype=np.float64)
    for i, row in enumerate(value):
        out[i] = _float_array(row, f"{where}[{i}]", length=width)
    return out


def _read_kernel(value: Any, where: str) -> KernelSpec:
    kind = _need(value, "kind", where)
    gamma = _need(value, "gamma", where)
    if gamma is not None:
        gamma = _as_float(gamma, where + "gamma")
    try:
        return KernelSpec(kind=kind, gamma=gamma)
    except ValueError as exc:
        raise BundleError(f"field {where[:-1]!r}: {exc}") from exc


def _read_svr(payload: Any) -> SvrModel:
    where = "model."
    d = _as_int(_need(payload, "n_features", where), where + "n_features")
    if d < 1:
        raise BundleError("field 'model.n_features': must be >= 1")
    sv = _float_matrix(_need(payload, "support_vectors", where), where + "support_vectors", d)
    coefs = _float_array(_need(payload, "dual_coefs", where), where + "dual_coefs", len(sv))
    bias = _as_float(_need(payload, "bias", where), where + "bias")
    kernel = _read_kernel(_need(payload, "kernel", where), where + "kernel.")
    c = _as_float(_need(payload, "c", where), where + "c")
    epsilon = _as_float(_need(payload, "epsilon", where), where + "epsilon")
    if c <= 0.0:
        raise BundleError("field 'model.c': must be positive")
    if epsilon < 0.0:
        raise BundleError("field 'model.epsilon': must be non-negative")
    if np.any(np.abs(coefs) > c * (1.0 + 1e-9)):
        raise BundleError("field 'model.dual_coefs': magnitude exceeds c")
    return SvrModel(
        support_vectors=sv,
        dual_coefs=coefs,
        bias=float(bias),
        kernel=kernel,
        c=float(c),
        epsilon=float(epsilon),
    )


def _read_tree(payload: Any, where: str, n_features: int) -> Tree:
    feature_raw = _need(payload, "feature", where)
    if not isinstance(feature_raw, list) or not feature_raw:
        raise BundleError(f"field {where + 'feature'!r}: expected a non-empty list")
    n_nodes = len(feature_raw)
    feature = np.empty(n_nodes, dtype=np.int32)
    for i, v in enumerate(feature_raw):
        feature[i] = _as_int(v, f"{where}feature[{i}]")
    left_raw = _need(payload, "left", where)
    right_raw = _need(payload, "right", where)
    thr_raw = _need(payload, "threshold", where)
    val_raw = _need(payload, "value", where)
    for name, arr in (("left", left_raw), ("right", right_raw),
                      ("threshold", thr_raw), ("value", val_raw)):
        if not isinstance(arr, list) or len(arr) != n_nodes:
            raise BundleError(f"field {where + name!r}: expected length {n_nodes}")
    left = np.empty(n_nodes, dtype=np.int32)
    right = np.empty(n_nodes, dtype=np.int32)
    threshold = np.full(n_nodes, np.nan)
    value = np.full(n_nodes, np.nan)
    for i in range(n_nodes):
        left[i] = _as_int(left_raw[i], f"{where}left[{i}]")
        right[i] = _as_int(right_raw[i], f"{where}right[{i}]")
        thr = _as_float(thr_raw[i], f"{where}threshold[{i}]", allow_none=True)
        val = _as_float(val_raw[i], f"{where}value[{i}]", allow_none=True)
        if feature[i] < 0:
            if feature[i] != -1 or left[i] != -1 or right[i] != -1:
                raise BundleError(f"field {where}feature[{i}]: malformed leaf")
            if val is None:
                raise BundleError(f"field {where}value[{i}]: leaf needs a value")
            value[i] = val
        else:
            if feature[i] >= n_features:
                raise BundleError(f"field {where}feature[{i}]: out of range")
            if thr is None:
                raise BundleError(f"field {where}threshold[{i}]: split needs a threshold")
            # Children must come after the parent so routing terminates.
            if not (i < left[i] < n_nodes and i < right[i] < n_nodes):
                raise BundleError(f"field {where}left[{i}]: child index out of order")
            if left[i] == right[i]:
                raise BundleError(f"field {where}right[{i}]: children must differ")
            threshold[i] = thr
    return Tree(feature=feature, threshold=threshold, left=left, right=right, value=value)


def _read_forest(payload: Any) -> ForestModel:
    where = "model."
    d = _as_int(_need(payload, "n_features", where), where + "n_features")
    n_trees = _as_int(_need(payload, "n_trees", where), where + "n_trees")
    if d < 1:
        raise BundleError("field 'model.n_features': must be >= 1")
    if n_trees < 1:
        raise BundleError("field 'model.n_trees': must be >= 1")
    max_depth_raw = _need(payload, "max_depth", where)
    max_depth = None if max_depth_raw is None else _as_int(max_depth_raw, where + "max_depth")
    msl = _as_int(_need(payload, "min_samples_leaf", where), where + "min_samples_leaf")
    max_features = _as_int(_need(payload, "max_features", where), where + "max_features")
    seed = _as_int(_need(payload, "seed", where), where + "seed")
    bootstrap = _need(payload, "bootstrap", where)
    if not isinstance(bootstrap, bool):
        raise BundleError("field 'model.bootstrap': expected a boolean")
    if msl < 1 or not 1 <= max_features <= d:
        raise BundleError("field 'model.min_samples_leaf': invalid tree limits")
    trees_raw = _need(payload, "trees", where)
    if not isinstance(trees_raw, list) or len(trees_raw) != n_trees:
        raise BundleError(f"field 'model.trees': expected {n_trees} trees")
    trees = tuple(
        _read_tree(t, f"model.trees[{i}].", d) for i, t in enumerate(trees_raw)
    )
    return ForestModel(
        trees=trees,
        n_features=d,
        n_trees=n_trees,
        max_depth=max_depth,
        min_samples_leaf=msl,
        max_features=max_features,
        seed=seed,
        bootstrap=bootstrap,
    )


def _read_knn(payload: Any) -> KnnModel:
    where = "model."
    d = _as_int(_need(payload, "n_features", where), where + "n_features")
    if d < 1:
        raise BundleError("field 'model.n_features': must be >= 1")
    features = _float_matrix(_need(payload, "features", where), where + "features", d)
    targets = _float_array(_need(payload, "targets", where), where + "targets", len(features))
    k = _as_int(_need(payload, "k", where), where + "k")
    if features.shape[0] < 1:
        raise BundleError("field 'model.features': need at least one row")
    if not 1 <= k <= features.shape[0]:
        raise BundleError("field 'model.k': must lie in [1, n]")
    return KnnModel(features=features, targets=targets, k=k)


def _read_preprocess(payload: Any) -> PreprocessParams:
    where = "preprocess."
    strategy = _need(payload, "strategy", where)
    if strategy not in STRATEGIES:
        raise BundleError(f"field 'preprocess.strategy': expected one of {STRATEGIES}")
    columns = _need(payload, "feature_columns", where)
    if columns != list(FEATURE_COLUMNS):
        raise BundleError("field 'preprocess.feature_columns': unexpected column order")
    medians_raw = _need(payload, "medians", where)
    if not isinstance(medians_raw, dict):
        raise BundleError("field 'preprocess.medians': expected an object")
    medians: dict[str, float] = {}
    for key, value in medians_raw.items():
        if key not in IMPUTABLE_COLUMNS:
            raise BundleError(f"field 'preprocess.medians.{key}': not an imputable column")
        medians[key] = _as_float(value, f"preprocess.medians.{key}")
    d = len(FEATURE_COLUMNS)
    means = _float_array(_need(payload, "feature_means", where), where + "feature_means", d)
    sds = _float_array(_need(payload, "feature_sds", where), where + "feature_sds", d)
    if np.any(sds < 0.0):
        raise BundleError("field 'preprocess.feature_sds': must be non-negative")
    return PreprocessParams(
        strategy=strategy,
        medians=medians,
        feature_means=tuple(float(v) for v in means),
        feature_sds=tuple(float(v) for v in sds),
    )


def _read_training_meta(meta: Any) -> dict:
    if not isinstance(meta, dict):
        raise BundleError("field 'training_meta': expected an object")
    for key in TRAINING_META_KEYS:
        if key not in meta:
            raise BundleError(f"field 'training_meta.{key}': missing")
    n_rows = meta["n_rows"]
    if isinstance(n_rows, bool) or not isinstance(n_rows, int) or n_rows < 1:
        raise BundleError("field 'training_meta.n_rows': expected a positive integer")
    seed = meta["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise BundleError("field 'training_meta.seed': expected an integer")
    for key in ("mean_cv_r2", "c", "epsilon", "gamma"):
        _as_float(meta[key], f"training_meta.{key}", allow_none=True)
    return meta


def _read_created_at(value: Any) -> str:
    if not isinstance(value, str):
        raise BundleError("field 'created_at': expected a string")
    try:
        dt.datetime.fromisoformat(value)
    except ValueError as exc:
        raise BundleError(f"field 'created_at': {exc}") from exc
    return value


def load_bundle(path: str | Path) -> Bundle:
    """Parse and validate one bundle file written by save_bundle."""
    source = Path(path)
    if not source.name.endswith(BUNDLE_SUFFIX):
        raise BundleError(f"bundle path must end with {BUNDLE_SUFFIX!r}")
    raw = source.read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise BundleError("not a model bundle: bad magic line")
    try:
        document = json.loads(raw[len(MAGIC) :].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BundleError(f"not a model bundle: {exc}") from exc
    if not isinstance(document, dict):
        raise BundleError("field 'format_version': missing")
    version = _need(document, "format_version", "")
    if version != FORMAT_VERSION:
        raise BundleError(f"field 'format_version': expected {FORMAT_VERSION}, got {version!r}")
    created_at = _read_created_at(_need(document, "created_at", ""))
    kind = _need(document, "model_kind", "")
    readers = {"Svr": _read_svr, "Forest": _read_forest, "Knn": _read_knn}
    if kind not in readers:
        raise BundleError(f"field 'model_kind': expected one of {tuple(readers)}")
    model = readers[kind](_need(document, "model", ""))
    if model_dim(model) != len(FEATURE_COLUMNS):
        raise BundleError("field 'model.n_features': does not match preprocessing columns")
    preprocess = _read_preprocess(_need(document, "preprocess", ""))
    meta = _read_training_meta(_need(document, "training_meta", ""))
    return Bundle(
        model=model,
        preprocess=preprocess,
        training_meta=meta,
        created_at=created_at,
    )
