"""HTTP gateway: the chair console and scripts drive the store through this API.

All endpoints operate on one conference document. Mutating endpoints return
the new workflow stage and persist the document when the app was created
with a path. Error mapping: 400 malformed request, 404 unknown id,
409 illegal state / duplicate edge / force required / infeasible.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import (
    CapacityRequiresForce,
    ConflictRequiresForce,
    DuplicateEdge,
    EngineError,
    IllegalState,
    Infeasible,
    UnknownEdge,
    UnknownId,
    UnknownKeyword,
    UnknownPaper,
    UnknownReviewer,
)
from .workflow import WorkflowStore, coi_view, matrix_view, proposal_view

_NOT_FOUND = (UnknownPaper, UnknownReviewer, UnknownEdge, UnknownId, UnknownKeyword)
_CONFLICT = (
    IllegalState,
    DuplicateEdge,
    ConflictRequiresForce,
    CapacityRequiresForce,
    Infeasible,
)


class ApproveRequest(BaseModel):
    edge_ids: Literal["all"] | list[str] = "all"
    actor: str = "chair"


class EdgeRequest(BaseModel):
    paper_id: str
    reviewer_id: str
    force: bool = False
    actor: str = "chair"


class PairModel(BaseModel):
    paper_id: str
    reviewer_id: str


class WhatIfRequest(BaseModel):
    pinned: list[PairModel] = []
    forbidden: list[PairModel] = []


class ActorRequest(BaseModel):
    actor: str = "chair"


def create_app(
    store: WorkflowStore,
    persist_path: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="confassign gateway")
    path = Path(persist_path) if persist_path else None

    def persist() -> None:
        if path is not None:
            store.save(path)

    @app.exception_handler(EngineError)
    def engine_error(_: Request, exc: EngineError) -> JSONResponse:
        status = 400
        if isinstance(exc, _NOT_FOUND):
            status = 404
        elif isinstance(exc, _CONFLICT):
            status = 409
        return JSONResponse(
            status_code=status, content={"error": exc.name, "detail": str(exc)}
        )

    @app.exception_handler(RequestValidationError)
    def malformed(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"error": "MalformedRequest", "detail": str(exc)}
        )

    @app.get("/api/status")
    def status() -> dict:
        return store.status()

    @app.get("/api/matrix")
    def get_matrix() -> dict:
        return matrix_view(store)

    @app.post("/api/matrix")
    def build_matrix(body: ActorRequest | None = None) -> dict:
        actor = body.actor if body else "chair"
        store.run_pipeline(actor=actor)
        persist()
        return {"stage": store.stage.value}

    @app.get("/api/proposal")
    def get_proposal() -> dict:
        return proposal_view(store)

    @app.post("/api/propose")
    def propose(body: ActorRequest | None = None) -> dict:
        actor = body.actor if body else "chair"
        store.propose(actor=actor)
        persist()
        return proposal_view(store)

    @app.post("/api/approve")
    def approve(body: ApproveRequest) -> dict:
        ids = None if body.edge_ids == "all" else list(body.edge_ids)
        stage = store.approve(ids, actor=body.actor)
        persist()
        return {"stage": stage.value}

    @app.post("/api/edges")
    def add_edge(body: EdgeRequest) -> dict:
        edge = store.manual_assign(
            body.paper_id, body.reviewer_id, force=body.force, actor=body.actor
        )
        persist()
        return {
            "stage": store.stage.value,
            "edge": {
                "edge_id": edge.edge_id,
                "paper_id": edge.paper_id,
                "reviewer_id": edge.reviewer_id,
                "factor": edge.factor,
                "origin": edge.origin.value,
                "approval": edge.approval.value,
            },
        }

    @app.delete("/api/edges/{paper_id}/{reviewer_id}")
    def remove_edge(paper_id: str, reviewer_id: str, actor: str = "chair") -> dict:
        store.manual_unassign(paper_id, reviewer_id, actor=actor)
        persist()
        return {"stage": store.stage.value}

    @app.post("/api/whatif")
    def what_if(body: WhatIfRequest) -> dict:
        proposal = store.what_if(
            pinned=[(p.paper_id, p.reviewer_id) for p in body.pinned],
            forbidden=[(p.paper_id, p.reviewer_id) for p in body.forbidden],
        )
        edges: list[dict[str, Any]] = [
            {
                "edge_id": e.edge_id,
                "paper_id": e.paper_id,
                "reviewer_id": e.reviewer_id,
                "factor": e.factor,
                "pass": e.pass_num,
                "origin": e.origin.value,
            }
            for e in proposal.edges
        ]
        return {
            "stage": store.stage.value,
            "edges": edges,
            "total_weight": proposal.total_weight(),
        }

    @app.get("/api/coi")
    def conflicts() -> list[dict]:
        return coi_view(store)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")

    return app
