"""HTTP prediction service.

Endpoints live under /api/v1; the built browser UI, when present, is
served from the filesystem at the root path.  The loaded bundle is
immutable shared state: handlers read one reference per request, so a
swap can never expose a half-loaded model.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..modelstore import FORMAT_VERSION, Bundle, load_bundle
from .pipeline import (
    BAND_NAMES,
    BAND_THRESHOLDS,
    FIELD_SPECS,
    RequestError,
    predict_pipeline,
    validate_request,
)

_NO_BUNDLE = {"errors": ["no model bundle loaded"]}


def create_app(
    bundle_path: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service; bundle and UI directory are both optional.

    Without a bundle the API answers 503 on /api/v1/predict and
    /api/v1/model until one is installed on app.state.bundle.
    """
    app = FastAPI(title="burnout-workbench", openapi_url=None)
    app.state.bundle = load_bundle(bundle_path) if bundle_path is not None else None

    @app.post("/api/v1/predict")
    async def handle_predict(request: Request) -> JSONResponse:
        bundle: Bundle | None = request.app.state.bundle
        if bundle is None:
            return JSONResponse(_NO_BUNDLE, status_code=503)
        try:
            payload = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            return JSONResponse({"errors": ["malformed JSON body"]}, status_code=400)
        try:
            validated = validate_request(payload)
        except RequestError as exc:
            return JSONResponse({"errors": exc.errors}, status_code=400)
        return JSONResponse(predict_pipeline(bundle, validated).to_dict())

    @app.get("/api/v1/model")
    async def handle_model_info(request: Request) -> JSONResponse:
        bundle: Bundle | None = request.app.state.bundle
        if bundle is None:
            return JSONResponse(_NO_BUNDLE, status_code=503)
        return JSONResponse(
            {
                "model_kind": bundle.model_kind,
                "format_version": FORMAT_VERSION,
                "created_at": bundle.created_at,
                "training_meta": dict(bundle.training_meta),
                "fields": [dict(spec) for spec in FIELD_SPECS],
                "band_thresholds": list(BAND_THRESHOLDS),
                "band_names": list(BAND_NAMES),
            }
        )

    @app.get("/api/v1/health")
    async def handle_health(request: Request) -> JSONResponse:
        return JSONResponse(
            {"status": "ok", "bundle_loaded": request.app.state.bundle is not None}
        )

    if static_dir is not None:
        root = Path(static_dir)
        if root.is_dir():
            app.mount("/", StaticFiles(directory=root, html=True), name="ui")
    return app
