"""Validated prediction requests and the shared inference pipeline.

The CLI, the HTTP service, and in-process callers all funnel through
validate_request and predict_pipeline, so the three paths cannot
disagree about validation rules or about the raw model output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from ..dataset import (
    COMPANY_TYPES,
    DESIGNATION_RANGE,
    FATIGUE_RANGE,
    GENDERS,
    RESOURCE_RANGE,
    WFH_VALUES,
    apply_scaler,
    encode_feature_row,
)
from ..evaluation import predict_model
from ..modelstore import FORMAT_VERSION, Bundle, model_dim

BAND_NAMES = ("Low", "Moderate", "High")
BAND_THRESHOLDS = (1.0 / 3.0, 2.0 / 3.0)

FIELD_SPECS: tuple[dict, ...] = (
    {
        "name": "designation",
        "kind": "int",
        "min": DESIGNATION_RANGE[0],
        "max": DESIGNATION_RANGE[1],
        "step": 1,
    },
    {
        "name": "resource_allocation",
        "kind": "int",
        "min": RESOURCE_RANGE[0],
        "max": RESOURCE_RANGE[1],
        "step": 1,
    },
    {
        "name": "mental_fatigue_score",
        "kind": "real",
        "min": FATIGUE_RANGE[0],
        "max": FATIGUE_RANGE[1],
        "step": 0.1,
    },
    {"name": "gender", "kind": "enum", "values": list(GENDERS)},
    {"name": "company_type", "kind": "enum", "values": list(COMPANY_TYPES)},
    {"name": "wfh_setup", "kind": "enum", "values": list(WFH_VALUES)},
)


class RequestError(ValueError):
    """Invalid prediction request; carries one message per bad field."""

    def __init__(self, errors: list[str]) -> None:
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True, slots=True)
class PredictRequest:
    designation: int
    resource_allocation: int
    mental_fatigue_score: float
    gender: str
    company_type: str
    wfh_setup: str


@dataclass(frozen=True, slots=True)
class PredictResponse:
    burn_rate_raw: float
    burn_rate: float
    risk_band: str
    model_meta: dict

    def to_dict(self) -> dict:
        return {
            "burn_rate_raw": self.burn_rate_raw,
            "burn_rate": self.burn_rate,
            "risk_band": self.risk_band,
            "model_meta": dict(self.model_meta),
        }


def _check_int(value: Any, name: str, lo: int, hi: int, errors: list[str]) -> int:
    # bool is an int subclass; reject it explicitly.
    if isinstance(value, bool):
        errors.append(f"{name}: expected an integer between {lo} and {hi}")
        return 0
    if isinstance(value, float):
        if not (math.isfinite(value) and value == int(value)):
            errors.append(f"{name}: expected an integer between {lo} and {hi}")
            return 0
        value = int(value)
    if not isinstance(value, int):
        errors.append(f"{name}: expected an integer between {lo} and {hi}")
        return 0
    if not lo <= value <= hi:
        errors.append(f"{name}: must lie between {lo} and {hi}")
        return 0
    return value


def _check_real(value: Any, name: str, lo: float, hi: float, errors: list[str]) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{name}: expected a number between {lo:g} and {hi:g}")
        return 0.0
    out = float(value)
    if not math.isfinite(out):
        errors.append(f"{name}: expected a finite number")
        return 0.0
    if not lo <= out <= hi:
        errors.append(f"{name}: must lie between {lo:g} and {hi:g}")
        return 0.0
    return out


def _check_enum(value: Any, name: str, allowed: tuple[str, ...], errors: list[str]) -> str:
    if not isinstance(value, str) or value not in allowed:
        errors.append(f"{name}: expected one of {', '.join(allowed)}")
        return allowed[0]
    return value


def validate_request(payload: Any) -> PredictRequest:
    """Build a PredictRequest, collecting every invalid field.

    Raises RequestError whose .errors lists one message per offending
    field (missing, unknown, wrong type, or out of range), never just
    the first problem.
    """
    if not isinstance(payload, Mapping):
        raise RequestError(["request body must be a JSON object"])
    known = {spec["name"] for spec in FIELD_SPECS}
    errors: list[str] = [f"{name}: missing" for name in known if name not in payload]
    errors.extend(f"{name}: unexpected field" for name in sorted(set(payload) - known))
    values: dict[str, Any] = {}
    if "designation" in payload:
        values["designation"] = _check_int(
            payload["designation"], "designation", *DESIGNATION_RANGE, errors
        )
    if "resource_allocation" in payload:
        values["resource_allocation"] = _check_int(
            payload["resource_allocation"], "resource_allocation", *RESOURCE_RANGE, errors
        )
    if "mental_fatigue_score" in payload:
        values["mental_fatigue_score"] = _check_real(
            payload["mental_fatigue_score"], "mental_fatigue_score", *FATIGUE_RANGE, errors
        )
    if "gender" in payload:
        values["gender"] = _check_enum(payload["gender"], "gender", GENDERS, errors)
    if "company_type" in payload:
        values["company_type"] = _check_enum(
            payload["company_type"], "company_type", COMPANY_TYPES, errors
        )
    if "wfh_setup" in payload:
        values["wfh_setup"] = _check_enum(payload["wfh_setup"], "wfh_setup", WFH_VALUES, errors)
    if errors:
        raise RequestError(sorted(errors))
    return PredictRequest(**values)


def risk_band(burn_rate: float) -> str:
    """Low < 1/3 <= Moderate < 2/3 <= High, on the clamped score."""
    if burn_rate < BAND_THRESHOLDS[0]:
        return "Low"
    if burn_rate < BAND_THRESHOLDS[1]:
        return "Moderate"
    return "High"


def predict_pipeline(bundle: Bundle, request: PredictRequest) -> PredictResponse:
    """Encode, standardize with the bundle's stored statistics, predict.

    The raw model output is preserved unclamped; burn_rate clamps it to
    [0, 1] for display and the risk band is computed from the clamped
    value.
    """
    vector = encode_feature_row(
        designation=request.designation,
        resource_allocation=request.resource_allocation,
        mental_fatigue_score=request.mental_fatigue_score,
        gender=request.gender,
        company_type=request.company_type,
        wfh_setup=request.wfh_setup,
    )
    if model_dim(bundle.model) != vector.size:
        raise RuntimeError(
            f"bundle model expects {model_dim(bundle.model)} features, got {vector.size}"
        )
    scaled = apply_scaler(
        vector,
        np.array(bundle.preprocess.feature_means),
        np.array(bundle.preprocess.feature_sds),
    )
    raw = float(predict_model(bundle.model, scaled))
    clamped = min(1.0, max(0.0, raw))
    return PredictResponse(
        burn_rate_raw=raw,
        burn_rate=clamped,
        risk_band=risk_band(clamped),
        model_meta={
            "model_kind": bundle.model_kind,
            "format_version": FORMAT_VERSION,
            "mean_cv_r2": bundle.training_meta.get("mean_cv_r2"),
        },
    )
