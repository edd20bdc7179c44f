"""HTTP JSON API for the human review loop, plus static hosting for the UI.

Errors surface as ``{code, message}`` with a 4xx status. When the
``PARACODE_TOKEN`` environment variable (or explicit token) is set, every
/api route requires ``Authorization: Bearer <token>``; coder identity is
self-declared per submission.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .classifiers import load_bundle
from .config import PipelineConfig
from .corpus import read_corpus
from .embedding import load_vectors
from .errors import (
    BadCursor,
    MalformedSubmission,
    ParacodeError,
    UnknownParagraph,
    UnknownSession,
)
from .evaluation import ManifestoReport, MetricReport
from .pipeline import evaluate_role
from .store import ReviewStore

_STATUS_BY_ERROR = {
    UnknownSession: 404,
    UnknownParagraph: 404,
    BadCursor: 400,
    MalformedSubmission: 400,
}

TOKEN_ENV = "PARACODE_TOKEN"


class VerdictSubmission(BaseModel):
    para_id: str
    dimension: str
    decision: str  # "accept" | "reject"
    coder_id: str


class ExportRequest(BaseModel):
    path: Optional[str] = None


class EvaluateRequest(BaseModel):
    corpus: str
    vectors: str
    bundle: str
    role: str
    threshold: Optional[int] = None


def _metric_to_dict(r: MetricReport) -> dict:
    return {
        "dimension": r.dimension,
        "role": r.role,
        "accuracy": r.accuracy,
        "precision": r.precision,
        "recall": r.recall,
        "f1": r.f1,
        "degenerate": list(r.degenerate),
    }


def _manifesto_to_dict(r: ManifestoReport) -> dict:
    return {
        "year": r.year,
        "party": r.party,
        "ae_true_prop": r.ae_true_prop,
        "ae_pred_prop": r.ae_pred_prop,
        "pc_true_prop": r.pc_true_prop,
        "pc_pred_prop": r.pc_pred_prop,
        "f1_ae": r.f1_ae,
        "f1_pc": r.f1_pc,
        "paragraph_count": r.paragraph_count,
    }


def create_app(
    store: ReviewStore,
    ui_dir: str | Path | None = None,
    token: str | None = None,
) -> FastAPI:
    app = FastAPI(title="paracode review service", docs_url=None, redoc_url=None)
    required_token = token if token is not None else os.environ.get(TOKEN_ENV)

    @app.exception_handler(ParacodeError)
    async def handle_pipeline_error(request: Request, exc: ParacodeError):
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        return JSONResponse(status_code=status, content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "malformed_submission", "message": str(exc.errors())},
        )

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if required_token and request.url.path.startswith("/api"):
            header = request.headers.get("authorization", "")
            if header != f"Bearer {required_token}":
                return JSONResponse(
                    status_code=401,
                    content={"code": "unauthorized", "message": "missing or bad token"},
                )
        return await call_next(request)

    @app.get("/api/sessions")
    def list_sessions():
        return {"sessions": store.list_sessions()}

    @app.get("/api/sessions/{session_id}/shortlist")
    def get_shortlist(
        session_id: str,
        dim: Optional[str] = None,
        cursor: Optional[str] = None,
        limit: int = 20,
        coder: Optional[str] = None,
    ):
        return store.shortlist_page(
            session_id, dimension=dim, cursor=cursor, limit=limit, coder_id=coder
        )

    @app.get("/api/sessions/{session_id}/progress")
    def get_progress(session_id: str):
        return {"session_id": session_id, "progress": store.progress(session_id)}

    @app.post("/api/sessions/{session_id}/verdicts")
    def post_verdict(session_id: str, submission: VerdictSubmission):
        verdict = store.submit_verdict(
            session_id,
            para_id=submission.para_id,
            dimension=submission.dimension,
            human_decision=submission.decision,
            coder_id=submission.coder_id,
        )
        return {
            "verdict_id": verdict.verdict_id,
            "para_id": verdict.para_id,
            "dimension": verdict.dimension,
            "human_decision": verdict.human_decision,
            "coder_id": verdict.coder_id,
            "timestamp": verdict.timestamp,
            "model_decision_at_time": verdict.model_decision_at_time,
            "progress": store.progress(session_id),
        }

    @app.post("/api/sessions/{session_id}/export")
    def post_export(session_id: str, request: ExportRequest | None = None):
        path = request.path if request and request.path else None
        if path is None:
            path = str(store.directory / f"export-{session_id}.jsonl")
        count = store.write_export(session_id, path)
        return {"session_id": session_id, "path": path, "count": count}

    @app.post("/api/evaluate")
    def post_evaluate(request: EvaluateRequest):
        corpus = read_corpus(request.corpus)
        vectors = load_vectors(request.vectors)
        bundle = load_bundle(request.bundle)
        config = PipelineConfig(threshold=request.threshold or 2)
        metric_reports, manifesto_reports = evaluate_role(
            config, bundle, corpus, vectors, request.role
        )
        return {
            "metrics": [_metric_to_dict(r) for r in metric_reports],
            "manifestos": [_manifesto_to_dict(r) for r in manifesto_reports],
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
