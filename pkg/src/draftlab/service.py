"""HTTP facade over a loaded model: prediction, similarity, pair explanation,
and draft recommendation.

The model is loaded once and never mutated, so request handling is freely
concurrent and identical requests always produce identical responses. Every
error body carries a stable machine-readable ``code`` plus human ``message``.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import ContractError
from .model import ModelParams, Roster, win_probability
from .queries import (DraftState, Recommendation, explain_pair,
                      recommend_pick, recommend_with_familiarity,
                      similar_avatars)

log = logging.getLogger("draftlab.service")


class ApiError(Exception):
    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


class PredictRequest(BaseModel):
    red: list[str] = Field(min_length=1, max_length=5)
    blue: list[str] = Field(min_length=1, max_length=5)


class RecommendRequest(BaseModel):
    ally: list[str] = Field(default_factory=list, max_length=4)
    enemy: list[str] = Field(default_factory=list, max_length=5)
    pool: list[str] | None = None
    familiar: list[str] | None = None
    top_k: int = 5
    sim_k: int = 3


def _resolve_names(registry, names, code="unknown_avatar") -> tuple[int, ...]:
    try:
        return registry.indices_of(names)
    except ContractError as exc:
        raise ApiError(code, str(exc)) from None


def _recommendation_body(registry, rec: Recommendation) -> dict:
    return {
        "avatar": registry.name_of(rec.avatar),
        "win_probability": rec.win_probability,
        "bias_delta": rec.bias_delta,
        "synergy_delta": rec.synergy_delta,
        "opposition_delta": rec.opposition_delta,
        "similar_familiar": [{"avatar": registry.name_of(f), "score": s}
                             for f, s in rec.similar_familiar],
    }


def create_app(params: ModelParams, log_requests: bool = False) -> FastAPI:
    app = FastAPI(title="draftlab", docs_url=None, redoc_url=None)
    registry = params.registry

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.exception_handler(ContractError)
    async def contract_error_handler(_request: Request, exc: ContractError):
        return JSONResponse(status_code=400,
                            content={"code": "contract_violation", "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"code": "bad_request", "message": str(exc.errors())})

    if log_requests:
        @app.middleware("http")
        async def request_logger(request: Request, call_next):
            response = await call_next(request)
            log.info("%s %s -> %d", request.method, request.url.path,
                     response.status_code)
            return response

    @app.get("/v1/avatars")
    async def avatars():
        return [{"index": i, "name": name} for i, name in enumerate(registry.names)]

    @app.post("/v1/predict")
    async def predict(body: PredictRequest):
        red = _resolve_names(registry, body.red)
        blue = _resolve_names(registry, body.blue)
        if set(red) & set(blue):
            overlap = sorted(registry.name_of(i) for i in set(red) & set(blue))
            raise ApiError("roster_overlap",
                           "avatar(s) on both teams: " + ", ".join(overlap))
        try:
            p = win_probability(params, Roster(red), Roster(blue))
        except ContractError as exc:
            raise ApiError("invalid_roster", str(exc)) from None
        return {"p_red_win": p}

    @app.post("/v1/recommend")
    async def recommend(body: RecommendRequest):
        ally = _resolve_names(registry, body.ally)
        enemy = _resolve_names(registry, body.enemy)
        pool = _resolve_names(registry, body.pool) if body.pool is not None else None
        familiar = _resolve_names(registry, body.familiar) if body.familiar is not None else None
        try:
            draft = DraftState(ally=ally, enemy=enemy, pool=pool, familiar=familiar)
            if familiar:
                result = recommend_with_familiarity(params, draft,
                                                    top_k=body.top_k, sim_k=body.sim_k)
                picks, familiar_best = result.picks, result.familiar_best
            else:
                picks = recommend_pick(params, draft, top_k=body.top_k)
                familiar_best = None
        except ContractError as exc:
            raise ApiError("invalid_draft", str(exc)) from None
        return {
            "recommendations": [_recommendation_body(registry, r) for r in picks],
            "familiar_best": (_recommendation_body(registry, familiar_best)
                              if familiar_best is not None else None),
        }

    @app.get("/v1/similar")
    async def similar(avatar: str, top_k: int = 5):
        (index,) = _resolve_names(registry, [avatar])
        try:
            ranked = similar_avatars(params, index, top_k)
        except ContractError as exc:
            raise ApiError("invalid_query", str(exc)) from None
        return [{"avatar": registry.name_of(i), "score": s} for i, s in ranked]

    @app.get("/v1/pair")
    async def pair(a: str, b: str):
        (i,) = _resolve_names(registry, [a])
        (j,) = _resolve_names(registry, [b])
        if i == j:
            raise ApiError("self_pair", "pick two distinct avatars")
        scores = explain_pair(params, i, j)
        return {"a": a, "b": b, "synergy": scores.synergy,
                "opposition": scores.opposition, "cosine": scores.cosine}

    return app
