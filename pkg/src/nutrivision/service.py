"""HTTP facade over the engine.

Thin, loss-free delegations: every response body is the canonical
serialization of the corresponding library result, so clients and golden
files see identical bytes whether they go through HTTP or the CLI.
"""

from __future__ import annotations

from fastapi import FastAPI, File, Query, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from . import canonical
from .engine import Engine
from .errors import NutriVisionError
from .profiles import FeedbackEvent, UserProfile, parse_timestamp, utc_now
from .quantify import PlateReport


def _canonical_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical.dump_bytes(payload),
        status_code=status_code,
        media_type="application/json",
    )


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="nutrivision", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.engine = engine

    @app.exception_handler(NutriVisionError)
    async def _domain_error(_request: Request, exc: NutriVisionError):
        return _canonical_response(
            {"code": exc.code, "message": str(exc)}, status_code=exc.http_status
        )

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return _canonical_response(
            {"code": "SCHEMA_ERROR", "message": str(exc)}, status_code=400
        )

    @app.post("/v1/analyze")
    async def analyze(
        image: UploadFile = File(...), detections: UploadFile = File(...)
    ):
        report = engine.analyze(await image.read(), await detections.read())
        return _canonical_response(report.to_dict())

    @app.post("/v1/users")
    async def upsert_user(request: Request):
        profile = UserProfile.from_dict(await _json_body(request))
        sequence = engine.upsert_profile(profile)
        return _canonical_response({"user_id": profile.user_id, "sequence": sequence})

    @app.get("/v1/users/{user_id}/bmi")
    async def bmi(user_id: str):
        return _canonical_response(engine.bmi(user_id).to_dict())

    @app.post("/v1/users/{user_id}/meals")
    async def log_meal(user_id: str, request: Request):
        body = await _json_body(request)
        timestamp = (
            parse_timestamp(body["timestamp"]) if "timestamp" in body else None
        )
        report = PlateReport.from_dict(body.get("report", body))
        sequence = engine.log_meal(user_id, report, timestamp=timestamp)
        return _canonical_response({"user_id": user_id, "sequence": sequence})

    @app.get("/v1/users/{user_id}/recommendations")
    async def recommendations(user_id: str, count: int = Query(default=5, ge=0)):
        return _canonical_response(engine.recommendations_payload(user_id, count=count))

    @app.post("/v1/users/{user_id}/feedback")
    async def feedback(user_id: str, request: Request):
        body = await _json_body(request)
        rating = body.get("rating")
        event = FeedbackEvent(
            user_id=user_id,
            recipe_id=str(body.get("recipe_id", "")),
            tried=bool(body.get("tried", False)),
            rating=int(rating) if rating is not None else None,
            timestamp=(
                parse_timestamp(body["timestamp"]) if "timestamp" in body else utc_now()
            ),
        )
        sequence = engine.feedback(event)
        return _canonical_response({"sequence": sequence})

    @app.get("/v1/recipes/{recipe_id}")
    async def recipe(recipe_id: str):
        return _canonical_response(engine.recipe(recipe_id).to_dict())

    return app


async def _json_body(request: Request) -> dict:
    from .errors import SchemaError

    try:
        body = await request.json()
    except Exception as exc:  # malformed JSON
        raise SchemaError(f"request body is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise SchemaError("request body must be a JSON object")
    return body
