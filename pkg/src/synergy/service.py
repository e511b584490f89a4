"""Read-only HTTP service over an immutable analysis snapshot.

Every request resolves the current snapshot exactly once, so responses are
internally consistent even while a hot-swap publishes a newer version.
Domain errors map to 422 with a stable error code, malformed bodies to 400.
"""
from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import SynergyError
from .recommend import DraftState, Weights, recommend, what_if
from .snapshot import AnalysisSnapshot, estimate_to_dict, pair_entry_to_dict


class SnapshotStore:
    """Holds the live snapshot; swap is atomic and version-checked."""

    def __init__(self, snapshot: AnalysisSnapshot):
        self._lock = threading.Lock()
        self._snapshot = snapshot

    def get(self) -> AnalysisSnapshot:
        with self._lock:
            return self._snapshot

    def swap(self, snapshot: AnalysisSnapshot) -> None:
        with self._lock:
            if snapshot.version <= self._snapshot.version:
                raise ValueError(
                    f"snapshot version must increase: "
                    f"{snapshot.version} <= {self._snapshot.version}"
                )
            self._snapshot = snapshot


class EstimateModel(BaseModel):
    wins: int
    games: int
    rate: float
    ci_low: float
    ci_high: float


class MatrixEntryModel(BaseModel):
    pair: list[str]
    synergy: float
    set_value: float
    baseline_value: float
    joint: EstimateModel
    sufficient_games: bool


class HealthResponse(BaseModel):
    status: str
    snapshot_version: int


class PoolResponse(BaseModel):
    snapshot_version: int
    pool: list[str]
    records: int
    source_digest: str


class MatrixResponse(BaseModel):
    snapshot_version: int
    baseline: str
    min_games: int
    pool: list[str]
    entries: list[MatrixEntryModel]


class RecommendRequest(BaseModel):
    allies: list[str] = Field(default_factory=list)
    enemies: list[str] = Field(default_factory=list)
    unavailable: list[str] = Field(default_factory=list)
    k: Optional[int] = Field(default=None, ge=1)


class WhatIfRequest(RecommendRequest):
    candidate: str


class RecommendationModel(BaseModel):
    candidate: str
    total_score: float
    ally_component: float
    counter_component: float
    low_confidence: bool


class RecommendResponse(BaseModel):
    snapshot_version: int
    recommendations: list[RecommendationModel]


class ContributionModel(BaseModel):
    other: str
    value: float
    known: bool
    sufficient_games: bool


class WhatIfResponse(BaseModel):
    snapshot_version: int
    recommendation: RecommendationModel
    ally_contributions: list[ContributionModel]
    enemy_contributions: list[ContributionModel]
    projected_allies: list[str]


def _draft_state(req: RecommendRequest, snap: AnalysisSnapshot) -> DraftState:
    return DraftState(
        allies=tuple(req.allies),
        enemies=tuple(req.enemies),
        pool=snap.pool,
        unavailable=frozenset(req.unavailable),
    )


def _weights(snap: AnalysisSnapshot) -> Weights:
    return Weights(snap.config.ally_weight, snap.config.counter_weight)


def create_app(store: SnapshotStore, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="synergy", docs_url=None, redoc_url=None)

    @app.exception_handler(SynergyError)
    async def _domain_error(request: Request, exc: SynergyError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"error": exc.code, "detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "malformed", "detail": str(exc)})

    @app.exception_handler(Exception)
    async def _internal(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=500, content={"error": "internal", "detail": str(exc)})

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", snapshot_version=store.get().version)

    @app.get("/api/pool", response_model=PoolResponse)
    def pool() -> PoolResponse:
        snap = store.get()
        return PoolResponse(
            snapshot_version=snap.version,
            pool=list(snap.pool),
            records=snap.records,
            source_digest=snap.source_digest,
        )

    @app.get("/api/matrix", response_model=MatrixResponse)
    def matrix() -> MatrixResponse:
        snap = store.get()
        return MatrixResponse(
            snapshot_version=snap.version,
            baseline=snap.matrix.baseline.value,
            min_games=snap.matrix.min_games,
            pool=list(snap.matrix.pool),
            entries=[
                MatrixEntryModel(**pair_entry_to_dict(e)) for e in snap.matrix.entries
            ],
        )

    @app.post("/api/recommend", response_model=RecommendResponse)
    def recommend_endpoint(req: RecommendRequest) -> RecommendResponse:
        snap = store.get()
        ranked = recommend(
            snap.matrix,
            snap.counters,
            _draft_state(req, snap),
            k=req.k,
            weights=_weights(snap),
        )
        return RecommendResponse(
            snapshot_version=snap.version,
            recommendations=[RecommendationModel(**vars(r)) for r in ranked],
        )

    @app.post("/api/whatif", response_model=WhatIfResponse)
    def whatif_endpoint(req: WhatIfRequest) -> WhatIfResponse:
        snap = store.get()
        projection = what_if(
            snap.matrix,
            snap.counters,
            _draft_state(req, snap),
            req.candidate,
            weights=_weights(snap),
        )
        return WhatIfResponse(
            snapshot_version=snap.version,
            recommendation=RecommendationModel(**vars(projection.recommendation)),
            ally_contributions=[
                ContributionModel(**vars(c)) for c in projection.ally_contributions
            ],
            enemy_contributions=[
                ContributionModel(**vars(c)) for c in projection.enemy_contributions
            ],
            projected_allies=list(projection.projected_allies),
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve_app(app: FastAPI, host: str, port: int) -> None:
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="warning")
