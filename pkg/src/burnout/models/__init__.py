"""Native regression models: kernel SVR, random forest, k-nearest neighbours."""

from __future__ import annotations

from .forest import ForestModel, best_split, predict_forest, train_forest
from .kernels import KernelSpec, default_gamma, kernel_eval, kernel_matrix
from .knn import KnnModel, predict_knn, train_knn
from .svr import SmoConfig, SvrModel, predict_svr, train_svr

__all__ = [
    "ForestModel",
    "KernelSpec",
    "KnnModel",
    "SmoConfig",
    "SvrModel",
    "best_split",
    "default_gamma",
    "kernel_eval",
    "kernel_matrix",
    "predict_forest",
    "predict_knn",
    "predict_svr",
    "train_forest",
    "train_knn",
    "train_svr",
]
