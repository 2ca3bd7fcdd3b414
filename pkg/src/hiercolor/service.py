"""REST service hosting color-assignment sessions.

One process holds many sessions keyed by opaque ids.  Requests against
different sessions run concurrently; requests against one session are
serialized by a per-session lock, so expansion order — and therefore the
event log — is always well defined.  Endpoints run in the framework's
thread pool (plain ``def``), which is what makes those locks meaningful.

All color payloads carry both the LCh triple and the sRGB hex string, so
clients never have to do color math of their own.
"""

from __future__ import annotations

import threading
from dataclasses import replace
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .errors import ConfigurationError, ExpansionError, HierarchyError, NotFoundError
from .session import RNG_ALGORITHM, Session, config_from_json


class CreateSessionRequest(BaseModel):
    hierarchy: dict
    layout: Optional[dict] = None
    mode: str = "difference"
    seed: Optional[int] = None
    config: Optional[dict] = None


class ExpandRequest(BaseModel):
    node_id: str = Field(min_length=1)


class SessionStore:
    """Thread-safe registry of live sessions and their locks."""

    def __init__(self):
        self._guard = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}

    def add(self, session: Session) -> None:
        with self._guard:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()

    def get(self, session_id: str) -> tuple[Session, threading.Lock]:
        with self._guard:
            try:
                return self._sessions[session_id], self._locks[session_id]
            except KeyError:
                raise NotFoundError(session_id) from None

    def remove(self, session_id: str) -> None:
        with self._guard:
            if session_id not in self._sessions:
                raise NotFoundError(session_id)
            del self._sessions[session_id]
            del self._locks[session_id]

    def __len__(self):
        return len(self._sessions)


def _http(status: int, exc: Exception) -> HTTPException:
    detail = str(exc.args[0]) if exc.args else str(exc)
    return HTTPException(status_code=status, detail=detail)


def create_app(store: Optional[SessionStore] = None) -> FastAPI:
    app = FastAPI(title="hiercolor session service", version="1.0")
    app.state.store = store if store is not None else SessionStore()

    def _session(session_id: str) -> tuple[Session, threading.Lock]:
        try:
            return app.state.store.get(session_id)
        except NotFoundError as exc:
            raise _http(404, exc) from exc

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest) -> dict:
        config = config_from_json(req.config)
        if req.seed is not None:
            config = replace(config, seed=req.seed)
        try:
            session = Session(
                req.hierarchy, layout=req.layout, mode=req.mode, config=config
            )
        except (HierarchyError, ConfigurationError, ValueError) as exc:
            raise _http(422, exc) from exc
        app.state.store.add(session)
        payload = session.palette_payload()
        payload["warnings"] = list(session.warnings)
        return payload

    @app.post("/sessions/{session_id}/expand")
    def expand_node(session_id: str, req: ExpandRequest) -> dict:
        session, lock = _session(session_id)
        with lock:
            before = len(session.warnings)
            try:
                palette = session.expand(req.node_id)
            except NotFoundError as exc:
                raise _http(404, exc) from exc
            except ExpansionError as exc:
                raise _http(409, exc) from exc
            context_id = session.context_of(req.node_id)
            return {
                "session_id": session.id,
                "node_id": req.node_id,
                "rng": RNG_ALGORITHM,
                "children": palette.to_json(),
                "ranges": session.ranges_payload(context_id),
                "warnings": list(session.warnings[before:]),
            }

    @app.get("/sessions/{session_id}/palette")
    def get_palette(session_id: str) -> dict:
        session, lock = _session(session_id)
        with lock:
            return session.palette_payload()

    @app.get("/sessions/{session_id}/evaluation")
    def get_evaluation(session_id: str) -> dict:
        session, lock = _session(session_id)
        with lock:
            return session.evaluation_payload()

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> None:
        try:
            app.state.store.remove(session_id)
        except NotFoundError as exc:
            raise _http(404, exc) from exc

    return app


app = create_app()
