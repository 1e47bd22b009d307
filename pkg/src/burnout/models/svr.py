"""Epsilon-insensitive support vector regression trained by SMO.

The dual is solved in the doubled coordinate space a = [alpha; alpha*]
with signs z = [+1...; -1...], box bounds [0, C], and one equality
constraint z @ a = 0:

    minimize  f(a) = 0.5 a^T Q a + p^T a
    with      Q = (z z^T) * tile(K),  p = [eps - y; eps + y].

Each iteration picks the first-order maximal violating pair over a
cached gradient, solves the two-variable subproblem analytically along
the constraint, and clips to the box.  Full-set sweeps alternate with
sweeps restricted to non-bound (violator) coordinates; the solver stops
once no KKT violation exceeds tol for max_passes consecutive sweeps, or
at the max_iters safety cap.  beta = alpha - alpha* yields the usual
expansion f(x) = sum_i beta_i K(x_i, x) + b.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, RBF, default_gamma, kernel_matrix

_CACHE_BYTES = 256 * 1024 * 1024  # kernel column cache budget per training run
_SV_EPS = 1e-12  # coefficients at or below this are not support vectors


@dataclass(frozen=True, slots=True)
class SmoConfig:
    """Solver knobs: tol is the KKT violation tolerance, seed shuffles
    tie-breaking among equally violating pairs, max_iters defaults to
    10 * n_rows floored at 10000 pair updates (small problems need more
    than 10 * n updates to reach tol, so the cap must not bind there)."""

    tol: float = 1e-3
    max_passes: int = 5
    max_iters: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be positive when given")


@dataclass(frozen=True, slots=True)
class SvrModel:
    support_vectors: np.ndarray  # (m, d)
    dual_coefs: np.ndarray  # (m,), every entry nonzero, |coef| <= c
    bias: float
    kernel: KernelSpec
    c: float
    epsilon: float


class _Solver:
    def __init__(self, x: np.ndarray, y: np.ndarray, c: float, epsilon: float,
                 kernel: KernelSpec, config: SmoConfig) -> None:
        self.x = x
        self.n = y.size
        self.c = c
        self.kernel = kernel
        self.alpha = np.zeros(2 * self.n)
        self.grad = np.concatenate([epsilon - y, epsilon + y])
        self.linear = self.grad.copy()  # p, kept for objective evaluation
        self.bound_snap = 1e-12 * max(1.0, c)
        self.perm = np.random.default_rng(config.seed).permutation(2 * self.n)
        self.cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self.cache_cap = max(2, _CACHE_BYTES // (8 * self.n))
        if kernel.kind == RBF:
            self.sq = np.einsum("ij,ij->i", x, x)

    def column(self, base: int) -> np.ndarray:
        """Kernel values K(x_base, x_t) for all t, cached per base index."""
        col = self.cache.get(base)
        if col is not None:
            self.cache.move_to_end(base)
            return col
        if self.kernel.kind == RBF:
            d2 = self.sq + self.sq[base] - 2.0 * (self.x @ self.x[base])
            np.clip(d2, 0.0, None, out=d2)
            col = np.exp(-self.kernel.gamma * d2)
        else:
            col = self.x @ self.x[base]
        if len(self.cache) >= self.cache_cap:
            self.cache.popitem(last=False)
        self.cache[base] = col
        return col

    def select(self, free_only: bool) -> tuple[int, int, float] | None:
        """Maximal violating pair (i from I_up, j from I_low) and violation."""
        n, a, c = self.n, self.alpha, self.c
        crit = np.empty(2 * n)
        crit[:n] = -self.grad[:n]
        crit[n:] = self.grad[n:]
        can_up = np.empty(2 * n, dtype=bool)
        can_up[:n] = a[:n] < c
        can_up[n:] = a[n:] > 0.0
        can_low = np.empty(2 * n, dtype=bool)
        can_low[:n] = a[:n] > 0.0
        can_low[n:] = a[n:] < c
        if free_only:
            free = (a > 0.0) & (a < c)
            can_up &= free
            can_low &= free
        crit_p = crit[self.perm]
        up_p = can_up[self.perm]
        low_p = can_low[self.perm]
        if not up_p.any() or not low_p.any():
            return None
        pi = int(np.argmax(np.where(up_p, crit_p, -np.inf)))
        pj = int(np.argmin(np.where(low_p, crit_p, np.inf)))
        violation = float(crit_p[pi] - crit_p[pj])
        return int(self.perm[pi]), int(self.perm[pj]), violation

    def update(self, i: int, j: int) -> bool:
        """Analytic step for the pair: a_i moves by z_i t, a_j by -z_j t."""
        n, a, c = self.n, self.alpha, self.c
        bi, bj = i % n, j % n
        zi = 1.0 if i < n else -1.0
        zj = 1.0 if j < n else -1.0
        col_i = self.column(bi)
        col_j = self.column(bj)
        slope = zi * self.grad[i] - zj * self.grad[j]  # negative for a violating pair
        curve = col_i[bi] + col_j[bj] - 2.0 * col_i[bj]
        t_lo = max(-a[i] if zi > 0 else a[i] - c, a[j] - c if zj > 0 else -a[j])
        t_hi = min(c - a[i] if zi > 0 else a[i], a[j] if zj > 0 else c - a[j])
        if curve > 1e-12:
            t = -slope / curve
        else:
            t = t_hi if slope < 0 else t_lo
        t = min(max(t, t_lo), t_hi)
        if t == 0.0:
            return False
        a[i] += zi * t
        a[j] -= zj * t
        for idx in (i, j):
            if a[idx] < self.bound_snap:
                a[idx] = 0.0
            elif a[idx] > c - self.bound_snap:
                a[idx] = c
        diff = col_i - col_j
        self.grad[:n] += t * diff
        self.grad[n:] -= t * diff
        return True

    def objective(self) -> float:
        """Dual objective in maximize form, from the gradient cache."""
        return -0.5 * float(self.alpha @ (self.grad + self.linear))

    def run(self, config: SmoConfig, trace: list[float] | None = None) -> int:
        max_iters = (
            config.max_iters if config.max_iters is not None else max(10 * self.n, 10_000)
        )
        iterations = 0
        clean_sweeps = 0
        full_clean = False
        free_mode = False
        while iterations < max_iters:
            selected = self.select(free_mode)
            if selected is None or selected[2] <= config.tol:
                if not free_mode:
                    full_clean = True
                clean_sweeps += 1
                if full_clean and clean_sweeps >= config.max_passes:
                    break
                free_mode = not free_mode
                continue
            clean_sweeps = 0
            full_clean = False
            if not self.update(selected[0], selected[1]):
                break  # numerically stuck pair; KKT tests guard quality
            iterations += 1
            if trace is not None:
                trace.append(self.objective())
            free_mode = True
        return iterations

    def bias(self) -> float:
        """Average the KKT equality over free coordinates; midpoint fallback."""
        n, a, c, grad = self.n, self.alpha, self.c, self.grad
        estimates = np.concatenate([-grad[:n][_free(a[:n], c)], grad[n:][_free(a[n:], c)]])
        if estimates.size:
            return float(estimates.mean())
        lower = [-math.inf]
        upper = [math.inf]
        lo_vals = np.concatenate([-grad[:n][a[:n] == 0.0], grad[n:][a[n:] == c]])
        hi_vals = np.concatenate([-grad[:n][a[:n] == c], grad[n:][a[n:] == 0.0]])
        if lo_vals.size:
            lower.append(float(lo_vals.max()))
        if hi_vals.size:
            upper.append(float(hi_vals.min()))
        lo, hi = max(lower), min(upper)
        if math.isinf(lo) and math.isinf(hi):
            return 0.0
        if math.isinf(lo):
            return hi
        if math.isinf(hi):
            return lo
        return 0.5 * (lo + hi)


def _free(values: np.ndarray, c: float) -> np.ndarray:
    return (values > 0.0) & (values < c)


def train_svr(
    features: np.ndarray,
    targets: np.ndarray,
    c: float = 1.0,
    epsilon: float = 0.1,
    kernel: KernelSpec | None = None,
    config: SmoConfig | None = None,
    objective_trace: list[float] | None = None,
) -> SvrModel:
    """Fit an SVR model; kernel defaults to RBF with the data-driven gamma.

    objective_trace, when a list, receives the dual objective after each
    pair update (instrumentation for monotonicity checks).
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    y = np.ascontiguousarray(targets, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.size:
        raise ValueError("features must be (n, d) with matching 1-d targets")
    if x.shape[0] < 1:
        raise ValueError("need at least one training row")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("training data must be finite")
    if c <= 0.0:
        raise ValueError("c must be positive")
    if epsilon < 0.0:
        raise ValueError("epsilon must be non-negative")
    if kernel is None:
        kernel = KernelSpec(RBF, default_gamma(x))
    if config is None:
        config = SmoConfig()

    solver = _Solver(x, y, c, epsilon, kernel, config)
    solver.run(config, objective_trace)
    beta = solver.alpha[: solver.n] - solver.alpha[solver.n :]
    keep = np.abs(beta) > _SV_EPS
    return SvrModel(
        support_vectors=x[keep].copy(),
        dual_coefs=beta[keep].copy(),
        bias=solver.bias(),
        kernel=kernel,
        c=c,
        epsilon=epsilon,
    )


def predict_svr(model: SvrModel, x: np.ndarray) -> float | np.ndarray:
    """Predict one vector (returns float) or a matrix of rows (returns array)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    queries = np.atleast_2d(x)
    values = (
        kernel_matrix(model.kernel, queries, model.support_vectors) @ model.dual_coefs
        + model.bias
    )
    return float(values[0]) if single else values
