"""K-nearest-neighbour regression over standardized features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class KnnModel:
    features: np.ndarray  # (n, d) training matrix, stored as-is
    targets: np.ndarray  # (n,)
    k: int


def train_knn(features: np.ndarray, targets: np.ndarray, k: int = 5) -> KnnModel:
    """Store the training sample; k must lie in [1, n]."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    y = np.ascontiguousarray(targets, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.size:
        raise ValueError("features must be (n, d) with matching 1-d targets")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("training data must be finite")
    if not 1 <= k <= x.shape[0]:
        raise ValueError(f"k must lie in [1, {x.shape[0]}]")
    return KnnModel(features=x, targets=y, k=k)


def predict_knn(model: KnnModel, x: np.ndarray) -> float | np.ndarray:
    """Mean target of the k nearest rows by Euclidean distance.

    Distances compare by squared value; exact distance ties resolve to
    the lower training-row index via a stable sort.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    queries = np.atleast_2d(x)
    if queries.shape[1] != model.features.shape[1]:
        raise ValueError(
            f"expected {model.features.shape[1]} features, got {queries.shape[1]}"
        )
    out = np.empty(queries.shape[0])
    for row, query in enumerate(queries):
        d2 = np.sum((model.features - query) ** 2, axis=1)
        order = np.argsort(d2, kind="stable")
        out[row] = model.targets[order[: model.k]].mean()
    return float(out[0]) if single else out
