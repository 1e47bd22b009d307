"""k-fold cross-validation and paired comparison of regression models.

Folds are built once and shared by every model so fold-level scores
pair up for the paired t-test.  Scaler statistics are refit inside each
training fold by default (no information from held-out rows); a global
standardization mode is kept for faithfully reproducing pipelines that
scaled before splitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import apply_scaler, fit_scaler
from .models import (
    ForestModel,
    KernelSpec,
    KnnModel,
    SmoConfig,
    SvrModel,
    predict_forest,
    predict_knn,
    predict_svr,
    train_forest,
    train_knn,
    train_svr,
)
from .stats import TTestResult, student_t_two_sided_p

MODEL_KINDS = ("svr", "forest", "knn")

AnyModel = SvrModel | ForestModel | KnnModel


@dataclass(frozen=True, slots=True)
class FoldPlan:
    """Assignment of each row to one of k folds, reproducible from seed."""

    n_rows: int
    k: int
    seed: int
    fold_assignments: np.ndarray  # (n_rows,) ints in [0, k)


def make_folds(n_rows: int, k: int, seed: int) -> FoldPlan:
    """Shuffle rows by seed, then deal k contiguous blocks.

    The first n_rows % k folds get ceil(n_rows / k) rows, the rest
    floor(n_rows / k), so sizes never differ by more than one.
    """
    if n_rows < 2:
        raise ValueError("need at least 2 rows to fold")
    if not 2 <= k <= n_rows:
        raise ValueError(f"k must lie in [2, {n_rows}]")
    perm = np.random.default_rng(seed).permutation(n_rows)
    assignment = np.empty(n_rows, dtype=np.int64)
    base, extra = divmod(n_rows, k)
    start = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        assignment[perm[start : start + size]] = fold
        start += size
    return FoldPlan(n_rows=n_rows, k=k, seed=seed, fold_assignments=assignment)


def r2_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Coefficient of determination; requires non-constant truth."""
    yt = np.asarray(y_true, dtype=np.float64)
    yp = np.asarray(y_pred, dtype=np.float64)
    if yt.shape != yp.shape or yt.ndim != 1:
        raise ValueError("inputs must be 1-d arrays of equal length")
    if yt.size < 2:
        raise ValueError("need at least 2 observations")
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValueError("r2 undefined for constant targets")
    ss_res = float(np.sum((yt - yp) ** 2))
    return 1.0 - ss_res / ss_tot


@dataclass(frozen=True, slots=True)
class ModelSpec:
    """Declarative model configuration used by the evaluation harness."""

    name: str
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"kind must be one of {MODEL_KINDS}")
        if not self.name:
            raise ValueError("model spec needs a name")


def fit_model(spec: ModelSpec, features: np.ndarray, targets: np.ndarray) -> AnyModel:
    """Train the model a spec describes on one (already scaled) matrix."""
    p = spec.params
    if spec.kind == "svr":
        kernel = None
        kind = p.get("kernel", "rbf")
        gamma = p.get("gamma")
        if kind == "linear":
            kernel = KernelSpec("linear")
        elif gamma is not None:
            kernel = KernelSpec("rbf", float(gamma))
        config = SmoConfig(
            tol=p.get("tol", 1e-3),
            max_passes=p.get("max_passes", 5),
            max_iters=p.get("max_iters"),
            seed=p.get("seed", 0),
        )
        return train_svr(
            features,
            targets,
            c=p.get("c", 1.0),
            epsilon=p.get("epsilon", 0.1),
            kernel=kernel,
            config=config,
        )
    if spec.kind == "forest":
        return train_forest(
            features,
            targets,
            n_trees=p.get("n_trees", 100),
            max_depth=p.get("max_depth", 16),
            min_samples_leaf=p.get("min_samples_leaf", 2),
            max_features=p.get("max_features"),
            seed=p.get("seed", 0),
            bootstrap=p.get("bootstrap", True),
        )
    return train_knn(features, targets, k=p.get("k", 5))


def predict_model(model: AnyModel, x: np.ndarray) -> float | np.ndarray:
    if isinstance(model, SvrModel):
        return predict_svr(model, x)
    if isinstance(model, ForestModel):
        return predict_forest(model, x)
    if isinstance(model, KnnModel):
        return predict_knn(model, x)
    raise TypeError(f"unknown model type {type(model).__name__}")


@dataclass(frozen=True, slots=True)
class CvReport:
    """Fold-level R^2 for one model; flagged folds hold nan scores."""

    model_name: str
    fold_scores: tuple[float, ...]  # length k, nan where flagged
    mean_r2: float
    std_r2: float
    flagged_folds: tuple[int, ...]


def cross_validate(
    spec: ModelSpec,
    features: np.ndarray,
    targets: np.ndarray,
    plan: FoldPlan,
    refit_scaler: bool = True,
) -> CvReport:
    """Train on k-1 folds and score R^2 on the held-out fold, k times.

    features are unscaled; standardization statistics are fit on the
    training rows of each fold (or once globally when
    refit_scaler=False) and applied to both partitions.  A fold whose
    validation targets are constant is flagged and excluded from the
    mean.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if x.shape[0] != plan.n_rows or y.size != plan.n_rows:
        raise ValueError("plan was built for a different number of rows")
    if not refit_scaler:
        global_means, global_sds = fit_scaler(x)
    scores: list[float] = []
    flagged: list[int] = []
    for fold in range(plan.k):
        val_mask = plan.fold_assignments == fold
        x_train, y_train = x[~val_mask], y[~val_mask]
        x_val, y_val = x[val_mask], y[val_mask]
        if y_val.size < 2 or np.all(y_val == y_val[0]):
            flagged.append(fold)
            scores.append(math.nan)
            continue
        if refit_scaler:
            means, sds = fit_scaler(x_train)
        else:
            means, sds = global_means, global_sds
        model = fit_model(spec, apply_scaler(x_train, means, sds), y_train)
        preds = predict_model(model, apply_scaler(x_val, means, sds))
        scores.append(r2_score(y_val, preds))
    valid = [s for s in scores if not math.isnan(s)]
    if not valid:
        raise ValueError("every fold had constant validation targets")
    return CvReport(
        model_name=spec.name,
        fold_scores=tuple(scores),
        mean_r2=float(np.mean(valid)),
        std_r2=float(np.std(valid, ddof=1)) if len(valid) > 1 else 0.0,
        flagged_folds=tuple(flagged),
    )


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sided paired t-test on matched score sequences."""
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.shape != xb.shape or xa.ndim != 1:
        raise ValueError("paired samples must be 1-d and equally long")
    k = xa.size
    if k < 2:
        raise ValueError("need at least 2 pairs")
    diff = xa - xb
    if np.all(diff == 0.0):
        raise ValueError("all differences are zero; samples are indistinguishable")
    sd = float(diff.std(ddof=1))
    if sd == 0.0:
        raise ValueError("differences have zero variance")
    t = float(diff.mean()) / (sd / math.sqrt(k))
    df = float(k - 1)
    return TTestResult(t=t, df=df, p_value=student_t_two_sided_p(t, df))


@dataclass(frozen=True, slots=True)
class PairwiseResult:
    model_a: str
    model_b: str
    t: float | None
    df: float | None
    p_value: float | None
    significant: bool
    indistinguishable: bool
    folds_used: int


@dataclass(frozen=True, slots=True)
class ComparisonReport:
    n_rows: int
    k: int
    seed: int
    alpha: float
    refit_scaler: bool
    cv_reports: tuple[CvReport, ...]
    pairwise: tuple[PairwiseResult, ...]

    def to_dict(self) -> dict:
        """JSON-ready form; nan fold scores become null."""
        return {
            "n_rows": self.n_rows,
            "k": self.k,
            "seed": self.seed,
            "alpha": self.alpha,
            "refit_scaler": self.refit_scaler,
            "models": [
                {
                    "name": r.model_name,
                    "fold_scores": [
                        None if math.isnan(s) else s for s in r.fold_scores
                    ],
                    "mean_r2": r.mean_r2,
                    "std_r2": r.std_r2,
                    "flagged_folds": list(r.flagged_folds),
                }
                for r in self.cv_reports
            ],
            "pairwise": [
                {
                    "model_a": p.model_a,
                    "model_b": p.model_b,
                    "t": p.t,
                    "df": p.df,
                    "p_value": p.p_value,
                    "significant": p.significant,
                    "indistinguishable": p.indistinguishable,
                    "folds_used": p.folds_used,
                }
                for p in self.pairwise
            ],
        }


def compare_models(
    specs: Sequence[ModelSpec],
    features: np.ndarray,
    targets: np.ndarray,
    plan: FoldPlan,
    alpha: float = 0.05,
    refit_scaler: bool = True,
) -> ComparisonReport:
    """Cross-validate every spec on one shared plan and test each pair.

    Pairs whose fold scores never differ are reported indistinguishable
    rather than given a t statistic.
    """
    if len(specs) < 1:
        raise ValueError("need at least one model spec")
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ValueError("model spec names must be unique")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    reports = [
        cross_validate(spec, features, targets, plan, refit_scaler=refit_scaler)
        for spec in specs
    ]
    pairwise: list[PairwiseResult] = []
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            a = np.asarray(reports[i].fold_scores)
            b = np.asarray(reports[j].fold_scores)
            both = ~(np.isnan(a) | np.isnan(b))
            used = int(both.sum())
            try:
                result = paired_t_test(a[both], b[both])
                pairwise.append(
                    PairwiseResult(
                        model_a=names[i],
                        model_b=names[j],
                        t=result.t,
                        df=result.df,
                        p_value=result.p_value,
                        significant=result.p_value < alpha,
                        indistinguishable=False,
                        folds_used=used,
                    )
                )
            except ValueError:
                pairwise.append(
                    PairwiseResult(
                        model_a=names[i],
                        model_b=names[j],
                        t=None,
                        df=None,
                        p_value=None,
                        significant=False,
                        indistinguishable=True,
                        folds_used=used,
                    )
                )
    return ComparisonReport(
        n_rows=plan.n_rows,
        k=plan.k,
        seed=plan.seed,
        alpha=alpha,
        refit_scaler=refit_scaler,
        cv_reports=tuple(reports),
        pairwise=tuple(pairwise),
    )
