"""Descriptive and inferential statistics for the burnout dataset.

Conventions: standardization elsewhere uses population standard
deviation, while every inferential routine here (Welch, paired t,
normality) uses sample variance (n - 1).  Tail probabilities come from
native implementations of the regularized incomplete beta and gamma
functions rather than a statistics library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import dataset
from .dataset import Table

_EPS = 1e-15
_MAX_ITER = 400


# ---------------------------------------------------------------------------
# Special functions: incomplete beta / gamma and the CDFs built on them.
# ---------------------------------------------------------------------------


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _EPS:
        d = _EPS
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _EPS:
            d = _EPS
        c = 1.0 + aa / c
        if abs(c) < _EPS:
            c = _EPS
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _EPS:
            d = _EPS
        c = 1.0 + aa / c
        if abs(c) < _EPS:
            c = _EPS
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-12:
            return h
    raise ArithmeticError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1], absolute accuracy ~1e-10."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("shape parameters must be positive")
    if x < 0.0 or x > 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Continued fraction converges fast only on one side of the mean.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x): series expansion below a + 1, continued fraction above."""
    if a <= 0.0:
        raise ValueError("shape parameter must be positive")
    if x < 0.0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(_MAX_ITER):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-15:
                break
        else:
            raise ArithmeticError(f"incomplete gamma series stalled for a={a}, x={x}")
        return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    # Lentz continued fraction for Q(a, x) = 1 - P(a, x).
    b = x + 1.0 - a
    c = 1.0 / _EPS
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _EPS:
            d = _EPS
        c = b + an / c
        if abs(c) < _EPS:
            c = _EPS
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-12:
            break
    else:
        raise ArithmeticError(f"incomplete gamma fraction stalled for a={a}, x={x}")
    q = h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    return 1.0 - q


def student_t_cdf(t: float, df: float) -> float:
    """CDF of Student's t with (possibly fractional) df > 0."""
    if df <= 0.0:
        raise ValueError("degrees of freedom must be positive")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x)
    return 1.0 - tail if t > 0 else tail


def student_t_two_sided_p(t: float, df: float) -> float:
    """Two-sided p-value for an observed t statistic."""
    if df <= 0.0:
        raise ValueError("degrees of freedom must be positive")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(0.5 * df, 0.5, x)


def chi2_cdf(x: float, df: float) -> float:
    """CDF of the chi-square distribution."""
    if df <= 0.0:
        raise ValueError("degrees of freedom must be positive")
    if x <= 0.0:
        return 0.0
    return regularized_lower_gamma(0.5 * df, 0.5 * x)


def chi2_sf(x: float, df: float) -> float:
    """Upper tail of the chi-square distribution."""
    return 1.0 - chi2_cdf(x, df)


# ---------------------------------------------------------------------------
# Descriptive and inferential statistics.
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TTestResult:
    t: float
    df: float
    p_value: float


@dataclass(frozen=True, slots=True)
class NormalityResult:
    statistic: float
    p_value: float


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation; errors on length mismatch or constant input."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-d sequences of equal length")
    if x.size < 2:
        raise ValueError("need at least 2 observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for constant input")
    r = float(dx @ dy) / (sx * sy)
    return max(-1.0, min(1.0, r))


_GROUP_FIELDS = ("gender", "company_type", "wfh_setup")
_NUMERIC_FIELDS = (
    "designation",
    "resource_allocation",
    "mental_fatigue_score",
    "burn_rate",
)


def group_medians(table: Table, group_by: str, target: str) -> dict[str, float]:
    """Median of a numeric field per category, present values only."""
    if group_by not in _GROUP_FIELDS:
        raise ValueError(f"group_by must be one of {_GROUP_FIELDS}")
    if target not in _NUMERIC_FIELDS:
        raise ValueError(f"target must be one of {_NUMERIC_FIELDS}")
    buckets: dict[str, list[float]] = {}
    for rec in table.records:
        value = getattr(rec, target)
        buckets.setdefault(getattr(rec, group_by), []).append(
            math.nan if value is None else float(value)
        )
    out: dict[str, float] = {}
    for group in sorted(buckets):
        values = np.array(buckets[group])
        present = values[~np.isnan(values)]
        if present.size == 0:
            raise ValueError(f"group {group!r} has no present {target} values")
        out[group] = float(np.median(present))
    return out


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.size < 2 or y.size < 2:
        raise ValueError("each sample needs at least 2 observations")
    va = float(x.var(ddof=1))
    vb = float(y.var(ddof=1))
    if va == 0.0 and vb == 0.0:
        raise ValueError("both samples have zero variance")
    sa = va / x.size
    sb = vb / y.size
    se2 = sa + sb
    t = (float(x.mean()) - float(y.mean())) / math.sqrt(se2)
    df = se2 * se2 / (sa * sa / (x.size - 1) + sb * sb / (y.size - 1))
    return TTestResult(t=t, df=df, p_value=student_t_two_sided_p(t, df))


def normality_test(xs: Sequence[float]) -> NormalityResult:
    """Omnibus normality test combining skewness and kurtosis z-scores.

    The statistic is K^2 = Z_skew^2 + Z_kurt^2, referred to a chi-square
    distribution with 2 df.  Requires at least 20 observations.
    """
    x = np.asarray(xs, dtype=np.float64)
    n = x.size
    if n < 20:
        raise ValueError("normality test needs at least 20 observations")
    centered = x - x.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise ValueError("normality test undefined for constant input")
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))

    # Skewness z-score (D'Agostino's transformation).
    g1 = m3 / m2**1.5
    y = g1 * math.sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)))
    beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) / (
        (n - 2.0) * (n + 5) * (n + 7) * (n + 9)
    )
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    if y == 0.0:
        z_skew = 0.0
    else:
        ratio = y / alpha
        z_skew = delta * math.log(ratio + math.sqrt(ratio * ratio + 1.0))

    # Kurtosis z-score (Anscombe-Glynn transformation).
    b2 = m4 / (m2 * m2)
    mean_b2 = 3.0 * (n - 1) / (n + 1)
    var_b2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) ** 2 * (n + 3) * (n + 5))
    xk = (b2 - mean_b2) / math.sqrt(var_b2)
    sqrt_beta1 = (
        6.0
        * (n * n - 5 * n + 2)
        / ((n + 7) * (n + 9))
        * math.sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2) * (n - 3)))
    )
    big_a = 6.0 + 8.0 / sqrt_beta1 * (
        2.0 / sqrt_beta1 + math.sqrt(1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1))
    )
    denom = 1.0 + xk * math.sqrt(2.0 / (big_a - 4.0))
    if denom == 0.0:
        raise ArithmeticError("kurtosis transform degenerate")
    term = ((1.0 - 2.0 / big_a) / abs(denom)) ** (1.0 / 3.0)
    if denom < 0:
        term = -term
    z_kurt = ((1.0 - 2.0 / (9.0 * big_a)) - term) / math.sqrt(2.0 / (9.0 * big_a))

    k2 = z_skew * z_skew + z_kurt * z_kurt
    return NormalityResult(statistic=k2, p_value=chi2_sf(k2, 2.0))


# ---------------------------------------------------------------------------
# Principal component analysis.
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PcaResult:
    components: np.ndarray  # (k, d), rows orthonormal
    explained_variance_ratio: np.ndarray  # (k,), shares of total variance
    projections: np.ndarray  # (n, k)


def pca(matrix: np.ndarray, n_components: int) -> PcaResult:
    """Eigendecomposition of the sample covariance of mean-centered input.

    Component signs are fixed so each component's largest-magnitude
    entry is positive, keeping runs reproducible.
    """
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("pca requires a 2-d matrix with at least 2 rows")
    n, d = x.shape
    if not 1 <= n_components <= d:
        raise ValueError(f"n_components must lie in [1, {d}]")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")
    evals = np.clip(evals[order], 0.0, None)
    total = float(evals.sum())
    if total <= 0.0:
        raise ValueError("pca undefined: input has zero total variance")
    components = evecs[:, order[:n_components]].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaResult(
        components=components,
        explained_variance_ratio=evals[:n_components] / total,
        projections=centered @ components.T,
    )


# ---------------------------------------------------------------------------
# EDA report.
# ---------------------------------------------------------------------------

_NUMERIC_SUMMARY_COLUMNS: Mapping[str, str] = {
    "Designation": "designation",
    "Resource Allocation": "resource_allocation",
    "Mental Fatigue Score": "mental_fatigue_score",
    "Burn Rate": "burn_rate",
}
_CATEGORICAL_SUMMARY_COLUMNS: Mapping[str, str] = {
    "Gender": "gender",
    "Company Type": "company_type",
    "WFH Setup Available": "wfh_setup",
}


def _present(table: Table, field: str) -> np.ndarray:
    values = [getattr(rec, field) for rec in table.records]
    return np.array([float(v) for v in values if v is not None], dtype=np.float64)


def _numeric_summary(table: Table, field: str) -> dict:
    values = _present(table, field)
    n = len(table.records)
    if values.size == 0:
        return {"count": 0, "missing": n, "mean": None, "median": None,
                "sd": None, "min": None, "max": None}
    return {
        "count": int(values.size),
        "missing": n - int(values.size),
        "mean": float(values.mean()),
        "median": float(np.median(values)),
        "sd": float(values.std(ddof=1)) if values.size > 1 else None,
        "min": float(values.min()),
        "max": float(values.max()),
    }


def _pairwise_pearson(table: Table, field_a: str, field_b: str) -> float | None:
    pairs = [
        (float(a), float(b))
        for a, b in (
            (getattr(rec, field_a), getattr(rec, field_b)) for rec in table.records
        )
        if a is not None and b is not None
    ]
    if len(pairs) < 2:
        return None
    xs, ys = zip(*pairs)
    try:
        return pearson(xs, ys)
    except ValueError:
        return None


def eda_report(table: Table) -> dict:
    """JSON-ready exploratory summary of one table.

    Contains per-column summaries, a pairwise-present correlation matrix
    over the numeric columns, burn-rate medians per categorical group,
    normality results, a Welch test of burn rate across WFH groups, and
    a two-component PCA of the standardized (median-imputed) features.
    """
    n = len(table.records)
    columns: dict[str, dict] = {}
    for name, field in _NUMERIC_SUMMARY_COLUMNS.items():
        columns[name] = _numeric_summary(table, field)
    for name, field in _CATEGORICAL_SUMMARY_COLUMNS.items():
        counts: dict[str, int] = {}
        for rec in table.records:
            value = getattr(rec, field)
            counts[value] = counts.get(value, 0) + 1
        columns[name] = {"count": n, "missing": 0,
                         "values": {k: counts[k] for k in sorted(counts)}}

    numeric_names = list(_NUMERIC_SUMMARY_COLUMNS)
    numeric_fields = list(_NUMERIC_SUMMARY_COLUMNS.values())
    matrix = [
        [
            1.0 if i == j else _pairwise_pearson(table, numeric_fields[i], numeric_fields[j])
            for j in range(len(numeric_fields))
        ]
        for i in range(len(numeric_fields))
    ]

    medians: dict[str, dict[str, float] | None] = {}
    for field in ("wfh_setup", "gender", "company_type"):
        try:
            medians[field] = group_medians(table, field, "burn_rate")
        except ValueError:
            medians[field] = None

    normality: dict[str, dict] = {}
    for name, field in _NUMERIC_SUMMARY_COLUMNS.items():
        values = _present(table, field)
        try:
            result = normality_test(values)
            normality[name] = {
                "statistic": result.statistic,
                "p_value": result.p_value,
                "n": int(values.size),
            }
        except (ValueError, ArithmeticError) as exc:
            normality[name] = {"skipped": str(exc), "n": int(values.size)}

    yes = np.array([r.burn_rate for r in table.records
                    if r.wfh_setup == "Yes" and r.burn_rate is not None])
    no = np.array([r.burn_rate for r in table.records
                   if r.wfh_setup == "No" and r.burn_rate is not None])
    welch: dict | None
    try:
        result = welch_t_test(no, yes)
        welch = {"t": result.t, "df": result.df, "p_value": result.p_value,
                 "groups": ["No", "Yes"]}
    except ValueError as exc:
        welch = {"skipped": str(exc)}

    pca_block: dict
    try:
        params = dataset.fit_preprocess(table, dataset.IMPUTE_MEDIAN)
        raw = dataset.encode_imputed(table, params.medians)
        scaled = dataset.apply_scaler(
            raw, np.array(params.feature_means), np.array(params.feature_sds)
        )
        result = pca(scaled, n_components=2)
        pca_block = {
            "explained_variance_ratio": [float(v) for v in result.explained_variance_ratio],
            "projections": [[float(a), float(b)] for a, b in result.projections],
        }
    except ValueError as exc:
        pca_block = {"skipped": str(exc)}

    return {
        "n_records": n,
        "source": table.source,
        "columns": columns,
        "correlations": {"columns": numeric_names, "matrix": matrix},
        "burn_rate_medians": medians,
        "normality": normality,
        "welch_burn_rate_by_wfh": welch,
        "pca": pca_block,
    }
