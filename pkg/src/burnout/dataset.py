"""Employee burnout dataset: CSV schema, preprocessing, synthetic generation.

The canonical CSV layout is one row per employee:

    Employee ID,Date of Joining,Gender,Company Type,WFH Setup Available,
    Designation,Resource Allocation,Mental Fatigue Score,Burn Rate

Resource Allocation, Mental Fatigue Score, and Burn Rate may be empty
(missing); every other column is required.  Supervised learning uses a
fixed six-column feature layout (see FEATURE_COLUMNS) with Burn Rate as
the target.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

CANONICAL_HEADER: tuple[str, ...] = (
    "Employee ID",
    "Date of Joining",
    "Gender",
    "Company Type",
    "WFH Setup Available",
    "Designation",
    "Resource Allocation",
    "Mental Fatigue Score",
    "Burn Rate",
)

# Encoded feature layout; order is part of the persisted model contract.
FEATURE_COLUMNS: tuple[str, ...] = (
    "designation",
    "resource_allocation",
    "mental_fatigue_score",
    "gender_female",
    "company_type_service",
    "wfh_yes",
)

# Columns that may be empty in a CSV and get a stored median.
IMPUTABLE_COLUMNS: tuple[str, ...] = (
    "resource_allocation",
    "mental_fatigue_score",
    "burn_rate",
)

IMPUTE_MEDIAN = "impute_median"
DROP_INCOMPLETE = "drop_incomplete"
STRATEGIES: tuple[str, ...] = (IMPUTE_MEDIAN, DROP_INCOMPLETE)

GENDERS = ("Female", "Male")
COMPANY_TYPES = ("Service", "Product")
WFH_VALUES = ("Yes", "No")

DESIGNATION_RANGE = (0, 5)
RESOURCE_RANGE = (1, 10)
FATIGUE_RANGE = (0.0, 10.0)
BURN_RATE_RANGE = (0.0, 1.0)

_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}")


class SchemaError(ValueError):
    """Structural problem with a CSV file (header, shape, emptiness)."""


class ParseError(ValueError):
    """Cell-level problem; message names the row and column."""


@dataclass(frozen=True, slots=True)
class EmployeeRecord:
    employee_id: str
    date_of_joining: dt.date
    gender: str
    company_type: str
    wfh_setup: str
    designation: int
    resource_allocation: int | None
    mental_fatigue_score: float | None
    burn_rate: float | None


@dataclass(frozen=True, slots=True)
class Table:
    """An ordered set of records plus where they came from."""

    records: tuple[EmployeeRecord, ...]
    source: str

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True, slots=True)
class PreprocessParams:
    """Frozen preprocessing statistics fitted on one training table.

    means/sds follow FEATURE_COLUMNS order; sds are population standard
    deviations (divide by n).  medians cover exactly the imputable
    columns, including the target even though the target is never
    imputed for supervised output.
    """

    strategy: str
    medians: dict[str, float]
    feature_means: tuple[float, ...]
    feature_sds: tuple[float, ...]


def _cell_error(row_no: int, column: str, detail: str) -> ParseError:
    return ParseError(f"row {row_no}, column {column!r}: {detail}")


def _parse_enum(text: str, allowed: tuple[str, ...], row_no: int, column: str) -> str:
    if text not in allowed:
        raise _cell_error(row_no, column, f"expected one of {allowed}, got {text!r}")
    return text


def _parse_date(text: str, row_no: int, column: str) -> dt.date:
    if not _DATE_RE.fullmatch(text):
        raise _cell_error(row_no, column, f"expected YYYY-MM-DD, got {text!r}")
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise _cell_error(row_no, column, str(exc)) from None


def _parse_int(text: str, lo: int, hi: int, row_no: int, column: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise _cell_error(row_no, column, f"not a number: {text!r}") from None
    if not math.isfinite(value) or value != int(value):
        raise _cell_error(row_no, column, f"expected an integer, got {text!r}")
    ivalue = int(value)
    if not lo <= ivalue <= hi:
        raise _cell_error(row_no, column, f"value {ivalue} outside [{lo}, {hi}]")
    return ivalue


def _parse_float(text: str, lo: float, hi: float, row_no: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise _cell_error(row_no, column, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise _cell_error(row_no, column, f"non-finite value {text!r}")
    if not lo <= value <= hi:
        raise _cell_error(row_no, column, f"value {value} outside [{lo}, {hi}]")
    return value


def load_csv(path: str | Path) -> Table:
    """Read a canonical CSV file into a Table.

    Raises SchemaError when the header deviates from CANONICAL_HEADER and
    ParseError (naming row and column) on any bad cell.  Row numbers in
    messages are file line numbers, so the first data row is row 2.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file, expected header row")
        if tuple(header) != CANONICAL_HEADER:
            missing = [c for c in CANONICAL_HEADER if c not in header]
            extra = [c for c in header if c not in CANONICAL_HEADER]
            raise SchemaError(
                f"{path}: header mismatch (missing {missing or 'none'}, "
                f"unexpected {extra or 'none'}, order must match canonical layout)"
            )
        records: list[EmployeeRecord] = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(CANONICAL_HEADER):
                raise SchemaError(
                    f"{path}: row {row_no} has {len(row)} cells, expected {len(CANONICAL_HEADER)}"
                )
            records.append(_parse_row(row, row_no))
    if not records:
        raise SchemaError(f"{path}: no data rows")
    return Table(records=tuple(records), source=str(path))


def _parse_row(row: Sequence[str], row_no: int) -> EmployeeRecord:
    (emp_id, date_str, gender, company, wfh, desig, resource, fatigue, burn) = (
        cell.strip() for cell in row
    )
    if not emp_id:
        raise _cell_error(row_no, "Employee ID", "must not be empty")
    if not date_str:
        raise _cell_error(row_no, "Date of Joining", "must not be empty")
    if not desig:
        raise _cell_error(row_no, "Designation", "must not be empty")
    return EmployeeRecord(
        employee_id=emp_id,
        date_of_joining=_parse_date(date_str, row_no, "Date of Joining"),
        gender=_parse_enum(gender, GENDERS, row_no, "Gender"),
        company_type=_parse_enum(company, COMPANY_TYPES, row_no, "Company Type"),
        wfh_setup=_parse_enum(wfh, WFH_VALUES, row_no, "WFH Setup Available"),
        designation=_parse_int(desig, *DESIGNATION_RANGE, row_no, "Designation"),
        resource_allocation=(
            _parse_int(resource, *RESOURCE_RANGE, row_no, "Resource Allocation")
            if resource
            else None
        ),
        mental_fatigue_score=(
            _parse_float(fatigue, *FATIGUE_RANGE, row_no, "Mental Fatigue Score")
            if fatigue
            else None
        ),
        burn_rate=(
            _parse_float(burn, *BURN_RATE_RANGE, row_no, "Burn Rate") if burn else None
        ),
    )


def write_csv(table: Table, path: str | Path) -> None:
    """Write a Table in the canonical layout; missing values become empty cells."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CANONICAL_HEADER)
        for rec in table.records:
            writer.writerow(
                [
                    rec.employee_id,
                    rec.date_of_joining.isoformat(),
                    rec.gender,
                    rec.company_type,
                    rec.wfh_setup,
                    str(rec.designation),
                    "" if rec.resource_allocation is None else str(rec.resource_allocation),
                    "" if rec.mental_fatigue_score is None else repr(rec.mental_fatigue_score),
                    "" if rec.burn_rate is None else repr(rec.burn_rate),
                ]
            )


def missing_report(table: Table) -> dict[str, int]:
    """Missing-value count per canonical column (required columns report 0)."""
    counts = {name: 0 for name in CANONICAL_HEADER}
    for rec in table.records:
        if rec.resource_allocation is None:
            counts["Resource Allocation"] += 1
        if rec.mental_fatigue_score is None:
            counts["Mental Fatigue Score"] += 1
        if rec.burn_rate is None:
            counts["Burn Rate"] += 1
    return counts


def encode_feature_row(
    designation: int,
    resource_allocation: float,
    mental_fatigue_score: float,
    gender: str,
    company_type: str,
    wfh_setup: str,
) -> np.ndarray:
    """Encode one observation into the fixed FEATURE_COLUMNS layout."""
    return np.array(
        [
            float(designation),
            float(resource_allocation),
            float(mental_fatigue_score),
            1.0 if gender == "Female" else 0.0,
            1.0 if company_type == "Service" else 0.0,
            1.0 if wfh_setup == "Yes" else 0.0,
        ],
        dtype=np.float64,
    )


def _raw_feature_matrix(records: Iterable[EmployeeRecord]) -> np.ndarray:
    """Feature matrix with NaN standing in for missing numeric cells."""
    rows = [
        [
            float(rec.designation),
            math.nan if rec.resource_allocation is None else float(rec.resource_allocation),
            math.nan if rec.mental_fatigue_score is None else rec.mental_fatigue_score,
            1.0 if rec.gender == "Female" else 0.0,
            1.0 if rec.company_type == "Service" else 0.0,
            1.0 if rec.wfh_setup == "Yes" else 0.0,
        ]
        for rec in records
    ]
    return np.array(rows, dtype=np.float64).reshape(-1, len(FEATURE_COLUMNS))


def _median_of_present(values: np.ndarray, column: str) -> float:
    present = values[~np.isnan(values)]
    if present.size == 0:
        raise ValueError(f"column {column!r} has no present values, no median defined")
    return float(np.median(present))


def fit_scaler(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and population standard deviations of a complete matrix."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 2:
        raise ValueError("scaler requires a 2-d matrix with at least 2 rows")
    return matrix.mean(axis=0), matrix.std(axis=0)


def apply_scaler(matrix: np.ndarray, means: np.ndarray, sds: np.ndarray) -> np.ndarray:
    """Standardize columns; a constant column (sd = 0) maps to all zeros."""
    matrix = np.asarray(matrix, dtype=np.float64)
    sds = np.asarray(sds, dtype=np.float64)
    safe = np.where(sds == 0.0, 1.0, sds)
    out = (matrix - np.asarray(means, dtype=np.float64)) / safe
    return np.where(sds == 0.0, 0.0, out)


def fit_preprocess(table: Table, strategy: str = IMPUTE_MEDIAN) -> PreprocessParams:
    """Fit imputation medians and scaler statistics on a training table.

    Medians come from present values only.  Scaler statistics are
    computed on the supervised matrix produced by the chosen strategy,
    so they describe exactly the rows a model would train on.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    if not table.records:
        raise ValueError("cannot fit preprocessing on an empty table")
    raw = _raw_feature_matrix(table.records)
    burn = np.array(
        [math.nan if r.burn_rate is None else r.burn_rate for r in table.records]
    )
    medians = {
        "resource_allocation": _median_of_present(raw[:, 1], "Resource Allocation"),
        "mental_fatigue_score": _median_of_present(raw[:, 2], "Mental Fatigue Score"),
        "burn_rate": _median_of_present(burn, "Burn Rate"),
    }
    features, _ = _supervised_matrix(raw, burn, medians, strategy)
    if features.shape[0] < 2:
        raise ValueError(
            f"strategy {strategy!r} leaves {features.shape[0]} supervised rows, need at least 2"
        )
    means, sds = fit_scaler(features)
    return PreprocessParams(
        strategy=strategy,
        medians=medians,
        feature_means=tuple(float(v) for v in means),
        feature_sds=tuple(float(v) for v in sds),
    )


def _supervised_matrix(
    raw: np.ndarray,
    burn: np.ndarray,
    medians: dict[str, float],
    strategy: str,
) -> tuple[np.ndarray, np.ndarray]:
    # Rows without a target are dropped under every strategy.
    has_target = ~np.isnan(burn)
    features = raw[has_target].copy()
    targets = burn[has_target]
    if strategy == DROP_INCOMPLETE:
        complete = ~np.isnan(features).any(axis=1)
        return features[complete], targets[complete]
    features[np.isnan(features[:, 1]), 1] = medians["resource_allocation"]
    features[np.isnan(features[:, 2]), 2] = medians["mental_fatigue_score"]
    return features, targets


def encode_imputed(table: Table, medians: Mapping[str, float]) -> np.ndarray:
    """Unscaled feature matrix for every record, missing cells imputed."""
    raw = _raw_feature_matrix(table.records)
    raw[np.isnan(raw[:, 1]), 1] = medians["resource_allocation"]
    raw[np.isnan(raw[:, 2]), 2] = medians["mental_fatigue_score"]
    return raw


def encode_supervised(table: Table, params: PreprocessParams) -> tuple[np.ndarray, np.ndarray]:
    """Strategy-filtered, imputed, unscaled feature matrix plus targets."""
    raw = _raw_feature_matrix(table.records)
    burn = np.array(
        [math.nan if r.burn_rate is None else r.burn_rate for r in table.records]
    )
    features, targets = _supervised_matrix(raw, burn, params.medians, params.strategy)
    if features.shape[0] == 0:
        raise ValueError("no supervised rows: every row lacks a burn rate")
    return features, targets


def apply_preprocess(table: Table, params: PreprocessParams) -> tuple[np.ndarray, np.ndarray]:
    """Standardized feature matrix and target vector for supervised rows."""
    features, targets = encode_supervised(table, params)
    scaled = apply_scaler(
        features, np.array(params.feature_means), np.array(params.feature_sds)
    )
    return scaled, targets


def generate_synthetic(n_rows: int, seed: int) -> Table:
    """Deterministic synthetic table mirroring the real dataset's shape.

    One latent burnout level b ~ Uniform(0,1) per employee drives every
    numeric column; burn_rate equals b exactly.  5% of resource and
    fatigue cells are masked missing.  Identical (n_rows, seed) inputs
    produce identical tables.
    """
    if n_rows < 1:
        raise ValueError("n_rows must be positive")
    rng = np.random.default_rng(seed)
    b = rng.uniform(0.0, 1.0, n_rows)
    fatigue = np.clip(10.0 * b + rng.normal(0.0, 0.7, n_rows), *FATIGUE_RANGE)
    resource = np.clip(
        np.rint(1.0 + 9.0 * b + rng.normal(0.0, 1.5, n_rows)), *RESOURCE_RANGE
    ).astype(int)
    designation = np.clip(
        np.rint(5.0 * b + rng.normal(0.0, 1.0, n_rows)), *DESIGNATION_RANGE
    ).astype(int)
    female = rng.random(n_rows) < 0.5
    service = rng.random(n_rows) < 0.5
    p_wfh = np.clip(0.7 - 0.4 * b, 0.05, 0.95)
    wfh = rng.random(n_rows) < p_wfh
    day_offsets = (rng.random(n_rows) * 366).astype(int)  # 2008 is a leap year
    resource_missing = rng.random(n_rows) < 0.05
    fatigue_missing = rng.random(n_rows) < 0.05

    start = dt.date(2008, 1, 1)
    records = tuple(
        EmployeeRecord(
            employee_id=f"synth-{i:06d}",
            date_of_joining=start + dt.timedelta(days=int(day_offsets[i])),
            gender="Female" if female[i] else "Male",
            company_type="Service" if service[i] else "Product",
            wfh_setup="Yes" if wfh[i] else "No",
            designation=int(designation[i]),
            resource_allocation=None if resource_missing[i] else int(resource[i]),
            mental_fatigue_score=None if fatigue_missing[i] else float(fatigue[i]),
            burn_rate=float(b[i]),
        )
        for i in range(n_rows)
    )
    return Table(records=records, source=f"synthetic(seed={seed}, n={n_rows})")
