"""Kernel functions shared by the SVR trainer and predictor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RBF = "rbf"
LINEAR = "linear"
KERNEL_KINDS = (RBF, LINEAR)


@dataclass(frozen=True, slots=True)
class KernelSpec:
    """Kernel identity plus parameters; gamma is required for RBF."""

    kind: str
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}, expected {KERNEL_KINDS}")
        if self.kind == RBF and (self.gamma is None or self.gamma <= 0.0):
            raise ValueError("rbf kernel requires gamma > 0")


def default_gamma(features: np.ndarray) -> float:
    """1 / (d * mean feature variance) on the training matrix."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("default_gamma needs a 2-d training matrix")
    mean_var = float(x.var(axis=0).mean())
    if mean_var <= 0.0:
        raise ValueError("default gamma undefined: features have zero variance")
    return 1.0 / (x.shape[1] * mean_var)


def kernel_eval(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> float:
    """Kernel value for a single pair of vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if spec.kind == LINEAR:
        return float(x @ y)
    diff = x - y
    return float(np.exp(-spec.gamma * (diff @ diff)))


def kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kernel values for every pair of rows, shape (len(a), len(b))."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    if spec.kind == LINEAR:
        return a @ b.T
    sq_a = np.einsum("ij,ij->i", a, a)
    sq_b = np.einsum("ij,ij->i", b, b)
    d2 = sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T)
    np.clip(d2, 0.0, None, out=d2)
    return np.exp(-spec.gamma * d2)
