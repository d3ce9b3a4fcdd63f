"""FastAPI application exposing POST /score and GET /health."""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import MAX_CANDIDATES, MIN_CANDIDATES, ServiceConfig
from .model import CandidateScorer, OverBudgetError


class ScoreRequest(BaseModel):
    evidence: str
    question: str
    candidates: list[str] = Field(min_length=MIN_CANDIDATES, max_length=MAX_CANDIDATES)


class ScoreResponse(BaseModel):
    scores: list[float]


def create_app(config: ServiceConfig) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.scorer = CandidateScorer(config)
        yield

    app = FastAPI(title="candidate scorer service", lifespan=lifespan)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:3])})

    def scorer_or_none(app: FastAPI) -> CandidateScorer | None:
        return getattr(app.state, "scorer", None)

    @app.get("/health")
    async def health(request: Request):
        scorer = scorer_or_none(request.app)
        if scorer is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok", "model_id": scorer.model_id}

    @app.post("/score", response_model=ScoreResponse)
    async def score(request: Request, body: ScoreRequest):
        scorer = scorer_or_none(request.app)
        if scorer is None:
            return JSONResponse(status_code=503, content={"error": "model not loaded yet"})
        try:
            scores = scorer.score(body.evidence, body.question, body.candidates)
        except OverBudgetError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        except Exception as exc:  # model failure
            return JSONResponse(status_code=500, content={"error": str(exc)})
        return {"scores": scores}

    return app
