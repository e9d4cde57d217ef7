"""HTTP service boundary consumed by the CLI and the browser frontend.

Thin JSON layer over the pipeline, chat service, and store: every response
body is the canonical serialization of the underlying record, so a process
restart reproduces identical GET responses from the reloaded store.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .chat import ChatService
from .errors import (
    BackendError,
    ConflictError,
    DomainError,
    NotFoundError,
    RadbridgeError,
)
from .labeler import UncertainPolicy
from .pipeline import Pipeline
from .store import CaseStore
from .types import CaseRecord, PromptDesign, grade_of


def _error_body(exc: RadbridgeError) -> dict:
    return {"error": {"kind": exc.kind, "message": str(exc)}}


def _status_for(exc: RadbridgeError) -> int:
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, ConflictError):
        return 409
    if isinstance(exc, DomainError):
        return 400
    if isinstance(exc, BackendError):
        return 502
    return 500


def create_app(
    store: CaseStore,
    pipeline: Pipeline,
    chat_service: ChatService,
    static_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="radbridge", docs_url=None, redoc_url=None)

    @app.exception_handler(RadbridgeError)
    async def handle_domain_error(request: Request, exc: RadbridgeError):
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc))

    def case_body(case: CaseRecord) -> dict:
        # The UI shows grade badges but must not grade client-side, so the
        # derived names ride along with the canonical record.
        body = case.to_json_dict()
        if case.scores is not None:
            body["severityGrades"] = {
                obs.json_key: grade_of(value).value for obs, value in case.scores.items()
            }
        return body

    @app.get("/api/cases")
    def list_cases():
        return {"cases": [case_body(c) for c in store.list_cases()]}

    @app.post("/api/cases")
    async def ingest_cases(request: Request):
        payload = await request.json()
        rows = payload.get("cases")
        if not isinstance(rows, list):
            raise DomainError('body must be {"cases": [...]}')
        result = pipeline.ingest_rows(enumerate(rows, start=1))
        return result.to_json_dict()

    @app.get("/api/cases/{case_id}")
    def get_case(case_id: str):
        return case_body(store.get_case(case_id))

    @app.post("/api/cases/{case_id}/refine")
    async def refine_case(case_id: str, request: Request):
        payload = await request.json()
        design = PromptDesign.from_string(str(payload.get("design", "")))
        backend_id = payload.get("backendId")
        if not backend_id:
            raise DomainError("refine request missing backendId")
        suppress = bool(payload.get("suppressMention", False))
        report, cached = pipeline.refine_case(case_id, design, backend_id, suppress)
        body = report.to_json_dict()
        body["cached"] = cached
        return body

    @app.get("/api/reports/{report_id}")
    def get_report(report_id: str):
        return store.get_report(report_id).to_json_dict()

    @app.post("/api/runs")
    async def start_run(request: Request):
        payload = await request.json()
        design = PromptDesign.from_string(str(payload.get("design", "")))
        backend_id = payload.get("backendId")
        if not backend_id:
            raise DomainError("run request missing backendId")
        per_category = int(payload.get("perCategory", 0))
        seed = int(payload.get("seed", 0))
        suppress = bool(payload.get("suppressMention", False))
        policy = UncertainPolicy.from_string(
            str(payload.get("uncertainPolicy", UncertainPolicy.AS_POSITIVE.value))
        )
        run, eval_report = pipeline.run_evaluation(
            design,
            backend_id,
            per_category,
            seed,
            suppress_mention=suppress,
            uncertain_policy=policy,
        )
        return {"run": run.to_json_dict(), "evalReport": eval_report.to_json_dict()}

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        run = store.get_run(run_id)
        body = {"run": run.to_json_dict()}
        if run.eval_report is not None:
            body["evalReport"] = run.eval_report
        return body

    @app.post("/api/chat")
    async def open_session(request: Request):
        payload = await request.json()
        case_id = payload.get("caseId")
        report_id = payload.get("reportId")
        if not case_id or not report_id:
            raise DomainError("chat session needs caseId and reportId")
        session = chat_service.open_session(case_id, report_id)
        return session.to_json_dict()

    @app.get("/api/chat/{session_id}")
    def get_transcript(session_id: str):
        return chat_service.transcript(session_id).to_json_dict()

    @app.post("/api/chat/{session_id}/messages")
    async def post_message(session_id: str, request: Request):
        payload = await request.json()
        question = payload.get("question", "")
        backend_id = payload.get("backendId")
        if not backend_id:
            raise DomainError("chat message missing backendId")
        turn = chat_service.ask(session_id, question, backend_id)
        return turn.to_json_dict()

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def build_app_from_config(config) -> FastAPI:
    store = CaseStore(config.store_path)
    lexicon = cues = None
    if config.lexicon_path or config.cues_path:
        from .labeler import load_cues, load_lexicon

        lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else None
        cues = load_cues(config.cues_path) if config.cues_path else None
    pipeline = Pipeline(
        store,
        config.backends,
        throttles=config.build_throttles(),
        lexicon=lexicon,
        cues=cues,
    )
    chat_service = ChatService(store, config.backends)
    return create_app(store, pipeline, chat_service, static_dir=config.static_dir)
