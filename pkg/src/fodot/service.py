"""HTTP/JSON API over knowledge bases and consultation sessions.

Distinct sessions serve requests concurrently; requests to one session are
serialized through its lock. Idle sessions expire after a configurable TTL.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .api import (
    json_to_value, load_kb, base_structure, parse_fact, parse_term,
    term_key, value_to_json, vocabulary_meta,
)
from .config import Config
from .consult import ConsultState, create_session
from .errors import (
    ConflictingAssert, FodotError, Inconsistent, InconsistentKB,
    NotAConsequence, NotUserFact, OverwriteEnumeration, ParseErrors,
    SolverProtocolError, SolverSpawnError, SolverUnknown, TypeErrors,
    TypeMismatch,
)
from .inference import Explanation
from .structure import term_text
from .typecheck import TypedKB


class KbBody(BaseModel):
    source: str


class SessionBody(BaseModel):
    kb_id: str


class EditBody(BaseModel):
    action: str                      # assert | retract
    term: str
    value: object | None = None


class ExplainBody(BaseModel):
    literal: str


class OptimizeBody(BaseModel):
    term: str
    direction: str = "minimize"


class ModelsBody(BaseModel):
    max: int = 1


@dataclass
class CompiledKB:
    kb_id: str
    source: str
    tkb: TypedKB
    meta: dict


@dataclass
class SessionEntry:
    session_id: str
    kb_id: str
    state: ConsultState
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)


class ApiState:
    def __init__(self, config: Config):
        self.config = config
        self.kbs: dict[str, CompiledKB] = {}
        self.sessions: dict[str, SessionEntry] = {}
        self.registry_lock = threading.Lock()

    def sweep(self) -> None:
        now = time.monotonic()
        with self.registry_lock:
            expired = [sid for sid, e in self.sessions.items()
                       if now - e.last_used > self.config.session_ttl_s]
            for sid in expired:
                entry = self.sessions.pop(sid)
                entry.state.close()

    def get_kb(self, kb_id: str) -> CompiledKB:
        kb = self.kbs.get(kb_id)
        if kb is None:
            raise HTTPException(404, f"unknown knowledge base {kb_id}")
        return kb

    def get_session(self, session_id: str) -> SessionEntry:
        self.sweep()
        entry = self.sessions.get(session_id)
        if entry is None:
            raise HTTPException(404, f"unknown session {session_id}")
        entry.last_used = time.monotonic()
        return entry


def explanation_json(explanation: Explanation) -> list[dict]:
    return [{"label": i.label, "kind": i.kind, "source": i.source}
            for i in explanation.items]


def state_json(state: ConsultState) -> dict:
    atoms = [{"atom": v.text, "status": v.status, "relevant": v.relevant}
             for v in state.atom_table()]
    terms = []
    for v in state.term_table():
        entry = {"term": v.text, "symbol": v.symbol, "status": v.status}
        if v.value is not None or v.status == "value":
            entry["value"] = value_to_json(v.value)
        terms.append(entry)
    return {"atoms": atoms, "terms": terms}


def diff_states(before: dict, after: dict) -> list[str]:
    prev = {a["atom"]: (a["status"], a["relevant"]) for a in before["atoms"]}
    changed = [a["atom"] for a in after["atoms"]
               if prev.get(a["atom"]) != (a["status"], a["relevant"])]
    prev_terms = {t["term"]: (t["status"], t.get("value"))
                  for t in before["terms"]}
    changed += [t["term"] for t in after["terms"]
                if prev_terms.get(t["term"]) != (t["status"], t.get("value"))]
    return changed


def create_app(config: Config | None = None,
               ui_dir: str | None = None) -> FastAPI:
    config = config or Config.load()
    app = FastAPI(title="fodot", version="0.1.0")
    state = ApiState(config)
    app.state.engine = state

    @app.exception_handler(FodotError)
    def engine_error(request, exc: FodotError):
        if isinstance(exc, ConflictingAssert):
            return JSONResponse(status_code=409, content={
                "error": str(exc),
                "explanation": explanation_json(exc.explanation)})
        if isinstance(exc, (ParseErrors, TypeErrors, TypeMismatch,
                            NotUserFact, OverwriteEnumeration,
                            NotAConsequence, Inconsistent, InconsistentKB)):
            return JSONResponse(status_code=422, content={"error": str(exc)})
        if isinstance(exc, (SolverSpawnError, SolverProtocolError,
                            SolverUnknown)):
            return JSONResponse(status_code=500, content={
                "error": f"solver failure: {exc}"})
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.post("/kb", status_code=201)
    def post_kb(body: KbBody):
        _, tkb = load_kb(body.source)
        kb_id = secrets.token_urlsafe(8)
        meta = vocabulary_meta(tkb)
        state.kbs[kb_id] = CompiledKB(kb_id, body.source, tkb, meta)
        return {"kb_id": kb_id, "meta": meta}

    @app.get("/kb/{kb_id}/meta")
    def get_meta(kb_id: str):
        return state.get_kb(kb_id).meta

    @app.post("/session", status_code=201)
    def post_session(body: SessionBody):
        compiled = state.get_kb(body.kb_id)
        consult = create_session(compiled.tkb, base_structure(compiled.tkb),
                                 config)
        session_id = secrets.token_urlsafe(16)
        entry = SessionEntry(session_id, compiled.kb_id, consult)
        with state.registry_lock:
            state.sessions[session_id] = entry
        return {"session_id": session_id, "kb_id": compiled.kb_id,
                "state": state_json(consult)}

    @app.get("/session/{session_id}/state")
    def get_state(session_id: str):
        entry = state.get_session(session_id)
        with entry.lock:
            return {"state": state_json(entry.state)}

    @app.post("/session/{session_id}/edit")
    def post_edit(session_id: str, body: EditBody):
        entry = state.get_session(session_id)
        compiled = state.get_kb(entry.kb_id)
        with entry.lock:
            before = state_json(entry.state)
            key = term_key(compiled.tkb,
                           parse_term(compiled.tkb, body.term))
            if body.action == "assert":
                if body.value is None:
                    raise HTTPException(422, "assert needs a value")
                entry.state.apply_assert(key, json_to_value(body.value))
            elif body.action == "retract":
                entry.state.apply_retract(key)
            else:
                raise HTTPException(422, f"unknown action {body.action!r}")
            after = state_json(entry.state)
            return {"state": after, "changed": diff_states(before, after)}

    @app.post("/session/{session_id}/explain")
    def post_explain(session_id: str, body: ExplainBody):
        entry = state.get_session(session_id)
        compiled = state.get_kb(entry.kb_id)
        with entry.lock:
            typed = parse_term(compiled.tkb, body.literal)
            ground = entry.state.reasoner.ground_expr(typed)
            explanation = entry.state.explain(ground, body.literal)
            return {"literal": body.literal,
                    "explanation": explanation_json(explanation)}

    @app.post("/session/{session_id}/optimize")
    def post_optimize(session_id: str, body: OptimizeBody):
        entry = state.get_session(session_id)
        compiled = state.get_kb(entry.kb_id)
        if body.direction not in ("minimize", "maximize"):
            raise HTTPException(422, "direction must be minimize or maximize")
        with entry.lock:
            typed = parse_term(compiled.tkb, body.term)
            value, model = entry.state.optimize(typed, body.direction)
            assignments = {term_text(k): value_to_json(v)
                           for k, v in sorted(model.items())}
            return {"term": body.term, "direction": body.direction,
                    "value": value_to_json(value),
                    "witness": assignments,
                    "state": state_json(entry.state)}

    @app.post("/session/{session_id}/models")
    def post_models(session_id: str, body: ModelsBody):
        entry = state.get_session(session_id)
        if body.max < 1:
            raise HTTPException(422, "max must be positive")
        with entry.lock:
            models = entry.state.model_expand(body.max)
            return {"models": [
                {term_text(k): value_to_json(v) for k, v in sorted(m.items())}
                for m in models]}

    @app.delete("/session/{session_id}", status_code=204)
    def delete_session(session_id: str):
        entry = state.get_session(session_id)
        with state.registry_lock:
            state.sessions.pop(session_id, None)
        entry.state.close()

    ui_path = ui_dir or _default_ui_dir()
    if ui_path is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_path, html=True), name="ui")
    return app


def _default_ui_dir() -> str | None:
    import os
    env = os.environ.get("FODOT_UI_DIR")
    if env and Path(env).is_dir():
        return env
    local = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    candidates = [Path("frontend/dist"), local]
    for c in candidates:
        if c.is_dir():
            return str(c)
    return None
