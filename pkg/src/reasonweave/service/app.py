"""HTTP facade over the session engine with a server-sent-events channel.

All client actions are discrete HTTP calls; only the event log streams.
Reconnecting clients replay from any sequence number, so nothing is lost
across drops. Node routes take a ``session`` query parameter because node
ids are session-scoped.
"""
from __future__ import annotations

import json
import os
import time
from typing import Iterator, Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from ..chain.edits import InvalidTargetError, UnknownIdError
from ..engine.engine import SessionEngine
from ..engine.errors import EngineError, FeedbackPending, InvalidPhase, NotAwaitingFeedback
from ..engine.session import Session
from ..providers.errors import ProviderError

KEEPALIVE_S = 15.0
POLL_S = 0.05


class PromptBody(BaseModel):
    prompt: str


class TextBody(BaseModel):
    text: str


class BranchBody(BaseModel):
    prompt: str


class FeedbackBody(BaseModel):
    answer: Optional[str] = None


def _error(status: int, code: str, message: str, ids: Optional[list[int]] = None):
    payload = {"code": code, "message": message}
    if ids:
        payload["ids"] = ids
    return JSONResponse(status_code=status, content=payload)


def create_app(engine: SessionEngine, *, token: Optional[str] = None,
               cors_origin: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="reasonweave", version="0.1.0")
    if cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def authorize(request: Request) -> None:
        if token is None or request.method in ("GET", "HEAD", "OPTIONS"):
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    def get_session(session_id: str) -> Session:
        session = engine.get_session(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    def node_session(session: str = Query(..., description="owning session id")) -> Session:
        return get_session(session)

    @app.exception_handler(UnknownIdError)
    async def unknown_id(_, exc: UnknownIdError):
        return _error(404, "unknown_id", str(exc), [exc.node_id])

    @app.exception_handler(InvalidTargetError)
    async def invalid_target(_, exc: InvalidTargetError):
        return _error(409, "invalid_target", str(exc))

    @app.exception_handler(NotAwaitingFeedback)
    async def not_awaiting(_, exc: NotAwaitingFeedback):
        return _error(409, "not_awaiting_feedback", str(exc), [exc.node_id])

    @app.exception_handler(FeedbackPending)
    async def feedback_pending(_, exc: FeedbackPending):
        return _error(409, "feedback_pending", str(exc), exc.node_ids)

    @app.exception_handler(InvalidPhase)
    async def invalid_phase(_, exc: InvalidPhase):
        return _error(409, "invalid_phase", str(exc))

    @app.exception_handler(EngineError)
    async def engine_error(_, exc: EngineError):
        return _error(409, exc.code, str(exc))

    @app.exception_handler(ValueError)
    async def validation_error(_, exc: ValueError):
        return _error(422, "validation", str(exc))

    @app.exception_handler(ProviderError)
    async def provider_error(_, exc: ProviderError):
        return _error(502, "provider_failure", str(exc))

    # -- sessions ---------------------------------------------------------

    @app.post("/sessions", status_code=201, dependencies=[Depends(authorize)])
    def create_session(body: PromptBody):
        session = engine.create_session(body.prompt)
        engine.start(session)
        return {"session_id": session.id}

    @app.get("/sessions/{session_id}")
    def session_document(session_id: str):
        return engine.session_document(get_session(session_id))

    @app.get("/sessions/{session_id}/events")
    def session_events(session_id: str, request: Request,
                       from_seq: int = Query(0, alias="from"),
                       once: bool = Query(False)):
        session = get_session(session_id)
        lock = engine.lock_for(session)

        def current(cursor: int):
            with lock:
                return session.events_from(cursor)

        def sse() -> Iterator[str]:
            cursor = from_seq
            last_send = time.monotonic()
            while True:
                batch = current(cursor)
                for event in batch:
                    cursor = event.seq + 1
                    data = json.dumps(event.to_dict(), ensure_ascii=False)
                    last_send = time.monotonic()
                    yield f"id: {event.seq}\ndata: {data}\n\n"
                if once:
                    return
                if time.monotonic() - last_send > KEEPALIVE_S:
                    last_send = time.monotonic()
                    yield ": keepalive\n\n"
                time.sleep(POLL_S)

        return StreamingResponse(sse(), media_type="text/event-stream")

    @app.post("/sessions/{session_id}/pause", status_code=204,
              dependencies=[Depends(authorize)])
    def pause(session_id: str):
        engine.pause(get_session(session_id))

    @app.post("/sessions/{session_id}/resume", status_code=204,
              dependencies=[Depends(authorize)])
    def resume(session_id: str):
        engine.resume(get_session(session_id))

    @app.post("/sessions/{session_id}/answer", status_code=202,
              dependencies=[Depends(authorize)])
    def answer(session_id: str):
        engine.generate_answer(get_session(session_id))
        return {"status": "answering"}

    @app.get("/sessions/{session_id}/links")
    def links(session_id: str):
        session = get_session(session_id)
        links = session.links.to_dict() if session.links else {"edges": []}
        links["display_threshold"] = engine.config.link_display_threshold
        return links

    # -- nodes ------------------------------------------------------------

    @app.patch("/nodes/{node_id}", dependencies=[Depends(authorize)])
    def edit_node(node_id: int, body: TextBody, session: Session = Depends(node_session)):
        node = engine.set_node_text(session, node_id, body.text)
        return node.to_dict()

    @app.delete("/nodes/{node_id}", status_code=204, dependencies=[Depends(authorize)])
    def delete_node(node_id: int, session: Session = Depends(node_session)):
        engine.delete_node(session, node_id)

    @app.post("/nodes/{node_id}/branch", status_code=201, dependencies=[Depends(authorize)])
    def branch(node_id: int, body: BranchBody, session: Session = Depends(node_session)):
        node = engine.branch_out(session, node_id, body.prompt)
        return node.to_dict()

    @app.post("/nodes/{node_id}/regenerate", status_code=202,
              dependencies=[Depends(authorize)])
    def regenerate(node_id: int, session: Session = Depends(node_session)):
        node = engine.regenerate_node(session, node_id)
        return node.to_dict()

    @app.post("/nodes/{node_id}/collapse", dependencies=[Depends(authorize)])
    def collapse(node_id: int, session: Session = Depends(node_session)):
        summary = engine.collapse_node(session, node_id)
        return summary.to_dict()

    @app.post("/nodes/{node_id}/expand", dependencies=[Depends(authorize)])
    def expand(node_id: int, session: Session = Depends(node_session)):
        engine.expand_node(session, node_id)
        return engine.get_session(session.id).tree.find(node_id).to_dict()

    @app.post("/nodes/{node_id}/feedback", status_code=202,
              dependencies=[Depends(authorize)])
    def feedback(node_id: int, body: FeedbackBody,
                 session: Session = Depends(node_session)):
        engine.submit_feedback(session, node_id, body.answer)
        return {"status": "accepted"}

    return app


def app_from_env() -> FastAPI:
    """Build an app from REASONWEAVE_CONFIG, for ``uvicorn reasonweave.service:app``."""
    from ..config import load_config
    from .wiring import build_engine

    config = load_config(os.environ.get("REASONWEAVE_CONFIG"))
    engine = build_engine(config, run_mode="thread")
    token = os.environ.get(config.server.token_env)
    return create_app(engine, token=token, cors_origin=config.server.cors_origin)
