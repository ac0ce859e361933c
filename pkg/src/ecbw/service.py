"""JSON-over-HTTP facade for live participant sessions.

The HTTP layer adds no behavior of its own: every endpoint delegates to the
session engine, and committed events are appended to the store file so a
crash never loses acknowledged sessions.  Errors respond with a JSON body
``{"code": ..., "message": ...}``.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .engine import (
    Phase,
    ReplayedCommitError,
    SessionEngine,
    SubmissionError,
    Submission,
    TerminatedError,
    UnknownSessionError,
)
from .selection import SelectionStrategy
from .store import IdeaStore, StoreConfig

logger = logging.getLogger(__name__)

ENV_PORT = "ECBW_PORT"
ENV_STORE_PATH = "ECBW_STORE_PATH"


@dataclass
class ServiceConfig:
    store_path: str
    strategy: str = "ecbw"
    topic: str = ""
    instructions: str = ""
    port: int = 8000
    host: str = "127.0.0.1"
    session_timeout_minutes: float = 60.0
    allowlist_path: str | None = None
    ui_dir: str | None = None
    target_idea_count: int = 210
    family_count: int = 12

    @classmethod
    def from_json_file(cls, path) -> "ServiceConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict) or "store_path" not in data:
            raise ValueError("service config must be an object with store_path")
        config = cls(**data)
        config.apply_env_overrides()
        return config

    def apply_env_overrides(self) -> None:
        if os.environ.get(ENV_PORT):
            self.port = int(os.environ[ENV_PORT])
        if os.environ.get(ENV_STORE_PATH):
            self.store_path = os.environ[ENV_STORE_PATH]


class LoginRequest(BaseModel):
    participant_no: int


class CellRef(BaseModel):
    column: int = Field(ge=0)
    row: int = Field(ge=0)


class IdeaEntry(BaseModel):
    column: int = Field(ge=0)
    text: str


class SubmitRequest(BaseModel):
    session_id: str
    votes: list[CellRef] = Field(default_factory=list)
    ideas: list[IdeaEntry] = Field(default_factory=list)


def load_allowlist(path) -> set[int]:
    """Participant numbers, one per line; blank lines and # comments skipped."""
    allowed = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            allowed.add(int(line))
    return allowed


def open_store(path, target_idea_count=210, family_count=12) -> IdeaStore:
    """Load the event log at ``path``, or start a fresh store there."""
    path = Path(path)
    if path.exists():
        return IdeaStore.load(path)
    store = IdeaStore(
        StoreConfig(target_idea_count=target_idea_count, family_count=family_count)
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    store.save(path)
    return store


class _StorePersister:
    """Appends newly committed events to the log file after each commit."""

    def __init__(self, store: IdeaStore, path):
        self.store = store
        self.path = Path(path)
        self._written = store.version
        self._lock = threading.Lock()

    def sync(self) -> None:
        with self._lock:
            events = self.store.events[self._written :]
            if not events:
                return
            with open(self.path, "a", encoding="utf-8", newline="") as fh:
                for event in events:
                    fh.write(
                        json.dumps(event, ensure_ascii=False, separators=(",", ":"))
                        + "\n"
                    )
                fh.flush()
                os.fsync(fh.fileno())
            self._written += len(events)


def create_app(
    engine: SessionEngine,
    topic: str = "",
    instructions: str = "",
    allowlist: set[int] | None = None,
    persister: _StorePersister | None = None,
    ui_dir=None,
) -> FastAPI:
    app = FastAPI(title="ideation service", docs_url=None, redoc_url=None)

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(
            status_code=status, content={"code": code, "message": message}
        )

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request: Request, exc: RequestValidationError):
        return error(422, "invalid_request", str(exc.errors()[:3]))

    @app.post("/api/login")
    def login(body: LoginRequest):
        if body.participant_no < 1:
            return error(400, "bad_participant", "participant number must be positive")
        if allowlist is not None and body.participant_no not in allowlist:
            return error(403, "not_allowed", "participant number not on the list")
        try:
            session = engine.login(body.participant_no)
        except TerminatedError as exc:
            return error(409, "terminated", str(exc))
        grid = [
            {
                "family": column.family_no,
                "cells": [
                    {"idea_id": idea_id, "text": text} for idea_id, text in cells
                ],
            }
            for column, cells in zip(
                session.grid.columns if session.grid else [],
                engine.grid_cells(session),
            )
        ]
        return {
            "session_id": session.session_id,
            "phase": session.phase.value,
            "topic": topic,
            "instructions": instructions,
            "grid": grid,
            "entry_slots": 3,
        }

    @app.post("/api/submit")
    def submit(body: SubmitRequest):
        votes = {(v.column, v.row) for v in body.votes}
        ideas: dict[int, str] = {}
        for entry in body.ideas:
            if entry.column in ideas:
                return error(
                    422, "invalid_request", f"two ideas for column {entry.column}"
                )
            ideas[entry.column] = entry.text
        try:
            receipt = engine.commit(
                body.session_id, Submission(voted_cells=votes, new_ideas=ideas)
            )
        except ReplayedCommitError as exc:
            return error(409, "already_submitted", str(exc))
        except UnknownSessionError as exc:
            return error(404, "unknown_session", str(exc))
        except SubmissionError as exc:
            return error(422, "invalid_submission", str(exc))
        if persister is not None:
            persister.sync()
        return {"n": receipt.n, "terminated": receipt.terminated}

    @app.get("/api/status")
    def status():
        return engine.status()

    if ui_dir is not None and Path(ui_dir).is_dir():
        index = Path(ui_dir) / "index.html"
        if index.exists():

            @app.get("/")
            def root():
                return FileResponse(index)

        app.mount("/", StaticFiles(directory=str(ui_dir)), name="ui")

    return app


def build_service(config: ServiceConfig):
    """Wire a store, engine, optional allowlist, and app from one config."""
    store = open_store(
        config.store_path,
        target_idea_count=config.target_idea_count,
        family_count=config.family_count,
    )
    engine = SessionEngine(
        store,
        SelectionStrategy.parse(config.strategy),
        session_timeout=config.session_timeout_minutes * 60.0,
    )
    allowlist = (
        load_allowlist(config.allowlist_path) if config.allowlist_path else None
    )
    persister = _StorePersister(store, config.store_path)
    ui_dir = config.ui_dir
    if ui_dir is None:
        default_ui = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        if default_ui.is_dir():
            ui_dir = str(default_ui)
    app = create_app(
        engine,
        topic=config.topic,
        instructions=config.instructions,
        allowlist=allowlist,
        persister=persister,
        ui_dir=ui_dir,
    )
    return app, engine, store


def serve(config: ServiceConfig) -> None:
    import uvicorn

    app, _, _ = build_service(config)
    logger.info(
        "serving store %s on %s:%d (strategy %s)",
        config.store_path,
        config.host,
        config.port,
        config.strategy,
    )
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
