"""HTTP API tying the knowledge base, linker, sessions, and analytics together.

Sessions live in memory and are persisted as append-only action logs in
``data_dir``; startup replays every log it finds, so open sessions
survive restarts. Mutating endpoints require the owning annotator's id
and take a per-session lock non-blockingly: a concurrent writer gets
409 instead of waiting (single-writer contract surfaced to HTTP).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, Query
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import analytics, linker, session as session_mod, storage
from .config import ProjectConfig
from .corpus import Corpus, load_corpus
from .errors import (
    BindError,
    KcatError,
    NotOwner,
    SessionBusy,
    UnknownFormat,
    UnknownSession,
)
from .kb import KnowledgeBase, load_kb_dir
from .linker import CandidateSet, generate_candidates, import_predictions, reduction_stats
from .session import AnnotationSession, open_session


@dataclass
class ServiceState:
    kb: KnowledgeBase
    corpus: Corpus
    data_dir: Path
    k_max: int
    predictions: dict[str, CandidateSet] = field(default_factory=dict)
    sessions: dict[str, AnnotationSession] = field(default_factory=dict)
    locks: dict[str, threading.Lock] = field(default_factory=dict)
    create_lock: threading.Lock = field(default_factory=threading.Lock)

    def session(self, session_id: str) -> AnnotationSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(f"unknown session {session_id!r}") from None

    def log_path(self, session_id: str) -> Path:
        return storage.log_path(self.data_dir, session_id)

    def mention_candidates(self, mention) -> CandidateSet:
        cs = self.predictions.get(mention.mention_id)
        if cs is None:
            cs = generate_candidates(self.kb, mention, self.k_max)
        return cs


def load_state(config: ProjectConfig) -> ServiceState:
    """Load KB, corpus, and predictions, then replay persisted sessions."""
    kb = load_kb_dir(config.kb_dir)
    corpus = load_corpus(config.corpus_file)
    predictions: dict[str, CandidateSet] = {}
    if config.predictions_file is not None:
        predictions = import_predictions(kb, config.predictions_file, config.k_max)

    state = ServiceState(kb=kb, corpus=corpus, data_dir=Path(config.data_dir),
                         k_max=config.k_max, predictions=predictions)
    state.data_dir.mkdir(parents=True, exist_ok=True)
    for log_file in sorted(state.data_dir.glob(f"*{storage.LOG_SUFFIX}")):
        sess = storage.replay_log(kb, corpus, log_file, predictions)
        state.sessions[sess.session_id] = sess
        state.locks[sess.session_id] = threading.Lock()
    return state


class OpenSessionBody(BaseModel):
    annotator: str
    doc_id: str


class TypeBody(BaseModel):
    annotator: str
    type: str


class EntityBody(BaseModel):
    annotator: str
    entity: str


class HistoryBody(BaseModel):
    annotator: str
    mention_id: str | None = None


class IntegrateBody(BaseModel):
    sessions: list[str]


def _session_view(state: ServiceState, sess: AnnotationSession) -> dict:
    mentions = []
    for mention in sess.doc.mentions:
        st = sess.states[mention.mention_id]
        offered = sorted(sess.offered_types(mention.mention_id))
        candidates = []
        for cand in st.working.candidates:
            record = state.kb.entity(cand.entity_id)
            candidates.append({
                "entity": cand.entity_id,
                "score": cand.score,
                "name": record.name,
                "description": record.description,
            })
        mentions.append({
            "mention_id": mention.mention_id,
            "start": mention.start,
            "end": mention.end,
            "surface": mention.surface,
            "phase": st.phase,
            "selected_types": list(st.selected_types),
            "final_label": st.final_label,
            "final_entity": st.final_entity,
            "predicted": st.working.predicted,
            "candidates": candidates,
            "offered_types": [
                {"path": t, "definition": state.kb.hierarchy.definitions.get(t, "")}
                for t in offered
            ],
        })
    return {
        "session_id": sess.session_id,
        "annotator": sess.annotator_id,
        "doc_id": sess.doc_id,
        "text": sess.doc.text,
        "undo_depth": len(sess.undo_stack),
        "redo_depth": len(sess.redo_stack),
        "mentions": mentions,
    }


def _annotation_file(sess: AnnotationSession) -> analytics.AnnotationFile:
    labels = {mid: st.final_label for mid, st in sess.states.items()
              if st.final_label is not None}
    return analytics.AnnotationFile(
        annotator_id=sess.annotator_id, doc_id=sess.doc_id, labels=labels)


def create_app(config: ProjectConfig) -> FastAPI:
    state = load_state(config)
    # the corpus listing owns GET /docs, so the generated API docs are off
    app = FastAPI(docs_url=None, redoc_url=None, openapi_url=None)
    app.state.service = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(KcatError)
    def _kcat_error(request, exc: KcatError):
        return JSONResponse(status_code=exc.http_status,
                            content={"error": exc.code, "detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    def _validation_error(request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": "ValidationError", "detail": str(exc)})

    def _mutate(session_id: str, annotator: str, op, action: dict) -> dict:
        sess = state.session(session_id)
        lock = state.locks[session_id]
        if not lock.acquire(blocking=False):
            raise SessionBusy(f"session {session_id!r} is being mutated")
        try:
            if annotator != sess.annotator_id:
                raise NotOwner(
                    f"session {session_id!r} is owned by {sess.annotator_id!r}")
            op(sess)
            # write-ahead: the action is durable before the client sees 2xx
            storage.append_action(state.log_path(session_id), action)
            return _session_view(state, sess)
        finally:
            lock.release()

    @app.get("/health")
    def health():
        return {"status": "ok", "types": len(state.kb.hierarchy),
                "docs": len(state.corpus)}

    @app.get("/docs")
    def list_docs():
        return {"documents": [
            {"doc_id": doc.doc_id, "mention_count": len(doc.mentions)}
            for doc in state.corpus.documents.values()
        ]}

    @app.get("/docs/{doc_id}")
    def get_doc(doc_id: str):
        doc = state.corpus.document(doc_id)
        return {
            "doc_id": doc.doc_id,
            "text": doc.text,
            "mentions": [
                {"mention_id": m.mention_id, "start": m.start, "end": m.end,
                 "surface": m.surface}
                for m in doc.mentions
            ],
        }

    @app.post("/sessions")
    def create_session(body: OpenSessionBody):
        doc = state.corpus.document(body.doc_id)
        with state.create_lock:
            sess = open_session(state.kb, doc, state.predictions,
                                annotator_id=body.annotator, k_max=state.k_max)
            state.sessions[sess.session_id] = sess
            state.locks[sess.session_id] = threading.Lock()
            storage.write_header(state.log_path(sess.session_id), sess)
        return {"session_id": sess.session_id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(state, state.session(session_id))

    @app.post("/sessions/{session_id}/mentions/{mention_id}/select-type")
    def select_type(session_id: str, mention_id: str, body: TypeBody):
        return _mutate(
            session_id, body.annotator,
            lambda s: s.select_type(mention_id, body.type),
            {"action": "select_type", "mention_id": mention_id, "type": body.type})

    @app.post("/sessions/{session_id}/mentions/{mention_id}/revise")
    def revise(session_id: str, mention_id: str, body: EntityBody):
        return _mutate(
            session_id, body.annotator,
            lambda s: s.revise_entity(mention_id, body.entity),
            {"action": "revise_entity", "mention_id": mention_id,
             "entity": body.entity})

    @app.post("/sessions/{session_id}/mentions/{mention_id}/label")
    def label(session_id: str, mention_id: str, body: TypeBody):
        return _mutate(
            session_id, body.annotator,
            lambda s: s.set_label(mention_id, body.type),
            {"action": "set_label", "mention_id": mention_id, "type": body.type})

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str, body: HistoryBody):
        return _mutate(session_id, body.annotator, lambda s: s.undo(),
                       {"action": "undo"})

    @app.post("/sessions/{session_id}/redo")
    def redo(session_id: str, body: HistoryBody):
        return _mutate(session_id, body.annotator, lambda s: s.redo(),
                       {"action": "redo"})

    @app.post("/sessions/{session_id}/reset")
    def reset(session_id: str, body: HistoryBody):
        action: dict = {"action": "reset"}
        if body.mention_id is not None:
            action["mention_id"] = body.mention_id
        return _mutate(session_id, body.annotator,
                       lambda s: s.reset(body.mention_id), action)

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str, format: str = Query("json")):
        sess = state.session(session_id)
        if format == "txt":
            return PlainTextResponse(session_mod.render_txt(sess))
        if format == "json":
            return Response(content=session_mod.render_json(sess),
                            media_type="application/json")
        raise UnknownFormat(f"unknown export format {format!r}")

    @app.get("/manage/matrix")
    def matrix(sessions: str = Query(...)):
        files = [_annotation_file(state.session(sid))
                 for sid in sessions.split(",") if sid]
        return analytics.accuracy_matrix(files).to_dict()

    @app.get("/manage/errors")
    def errors(gold: str = Query(...), pred: str = Query(...),
               format: str = Query("tex")):
        gold_file = _annotation_file(state.session(gold))
        pred_file = _annotation_file(state.session(pred))
        if format == "json":
            return {"counts": analytics.error_counts(state.kb.hierarchy,
                                                     gold_file, pred_file)}
        if format == "tex":
            return PlainTextResponse(analytics.error_report(
                state.kb.hierarchy, gold_file, pred_file, state.corpus))
        raise UnknownFormat(f"unknown report format {format!r}")

    @app.post("/manage/integrate")
    def integrate(body: IntegrateBody):
        files = [_annotation_file(state.session(sid)) for sid in body.sessions]
        return analytics.integrate(state.kb.hierarchy, files).to_dict()

    @app.get("/stats/reduction")
    def stats():
        css = [state.mention_candidates(m) for m in state.corpus.all_mentions()]
        return reduction_stats(state.kb, css).to_dict()

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(config.ui_dir), html=True),
                  name="ui")

    return app


def serve(config: ProjectConfig) -> None:
    """Validate, bind, and run the service until interrupted."""
    import socket

    import uvicorn

    config.validate()
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.host, config.port))
    except OSError as exc:
        raise BindError(f"cannot bind {config.listen_addr}: {exc}") from exc
    finally:
        probe.close()

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
