"""Application layer: request pipeline, HTTP service, and CLI."""

from .pipeline import (
    BAND_NAMES,
    BAND_THRESHOLDS,
    FIELD_SPECS,
    PredictRequest,
    PredictResponse,
    RequestError,
    predict_pipeline,
    risk_band,
    validate_request,
)
from .service import create_app

__all__ = [
    "BAND_NAMES",
    "BAND_THRESHOLDS",
    "FIELD_SPECS",
    "PredictRequest",
    "PredictResponse",
    "RequestError",
    "create_app",
    "predict_pipeline",
    "risk_band",
    "validate_request",
]
