"""HTTP facade over parsing, generation, and editing.

One FastAPI app holds a registry of in-memory sessions. Each session owns
a mesh model and an undo stack of canonical mesh snapshots (depth 20);
apply and undo take the session's writer lock, reads snapshot the current
model reference under the same lock. All error bodies are
{"code", "message", "detail"}.
"""
from __future__ import annotations

import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..checkpoint import CheckpointError, restore_net
from ..editing import EditError, apply_sequence, compile_api_calls
from ..geometry import MeshError, validate_model
from ..geometry.io import dumps_model, loads_model, model_from_dict
from ..geometry.synth import build_random_model
from ..generation.pointer import GenerationError, generate_feature_faces
from ..parsing.grammar import parse_with_grammar
from ..parsing.llm import LlmClient, parse_with_llm
from ..parsing.schema import validate_schema
from ..vocab import FEATURE_TYPES, UnknownFeatureType, canonical_feature_type
from .config import ServiceConfig

UNDO_DEPTH = 20


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


@dataclass
class Session:
    session_id: str
    model: object
    # canonical mesh snapshots taken just before each apply, newest last
    undo: list[str] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _mesh_payload(model) -> dict:
    return json.loads(dumps_model(model))


def create_app(config: Optional[ServiceConfig] = None, net=None) -> FastAPI:
    """Build the service app; a preloaded net overrides the checkpoint path."""
    config = config or ServiceConfig.from_env()
    app = FastAPI(title="sdm-workbench", version="0.1.0")
    # the browser viewer is served from its own origin (static files)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    app.state.config = config
    app.state.sessions = {}
    app.state.registry_lock = threading.Lock()
    app.state.net = net
    app.state.net_meta = None
    if net is None and config.checkpoint_path:
        app.state.net, app.state.net_meta = restore_net(config.checkpoint_path)

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message,
                                     "detail": exc.detail})

    @app.exception_handler(RequestValidationError)
    async def _bad_body(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"code": "bad_request",
                                     "message": "malformed request body",
                                     "detail": str(exc.errors()[:3])})

    def _session(session_id: str) -> Session:
        s = app.state.sessions.get(session_id)
        if s is None:
            raise ServiceError(404, "session_not_found",
                               f"no session {session_id}")
        return s

    @app.get("/health")
    def health():
        return {"status": "ok",
                "sessions": len(app.state.sessions),
                "checkpoint_loaded": app.state.net is not None,
                "llm_configured": bool(config.llm_endpoint)}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        if "model" in payload:
            try:
                model = model_from_dict(payload["model"])
            except MeshError as exc:
                raise ServiceError(400, "invalid_model",
                                   "model failed validation", str(exc))
        elif "synthetic" in payload:
            spec = payload["synthetic"]
            if not isinstance(spec, dict):
                raise ServiceError(400, "bad_request",
                                   "'synthetic' must be an object")
            try:
                seed = int(spec.get("seed", 0))
                types = [canonical_feature_type(t)
                         for t in spec.get("types", [])]
                if not types:
                    raise ValueError("types list is empty")
                model = build_random_model(f"synthetic-{seed}",
                                           random.Random(seed), types)
            except (UnknownFeatureType, ValueError, TypeError) as exc:
                raise ServiceError(400, "invalid_model",
                                   "bad synthetic spec", str(exc))
        else:
            raise ServiceError(400, "bad_request",
                               "body needs 'model' or 'synthetic'")
        with app.state.registry_lock:
            if len(app.state.sessions) >= config.session_limit:
                raise ServiceError(507, "session_limit",
                                   f"limit of {config.session_limit} sessions reached")
            session_id = uuid.uuid4().hex
            app.state.sessions[session_id] = Session(session_id, model)
        return {"session_id": session_id, "mesh": _mesh_payload(model)}

    @app.post("/sessions/{session_id}/parse")
    def parse(session_id: str, payload: dict = Body(...)):
        _session(session_id)
        text = payload.get("text")
        if not isinstance(text, str):
            raise ServiceError(400, "bad_request", "'text' string required")
        engine = payload.get("engine", "grammar")
        if engine == "grammar":
            res = parse_with_grammar(text)
        elif engine == "llm":
            if not config.llm_endpoint:
                raise ServiceError(503, "llm_unconfigured",
                                   "no LLM endpoint configured",
                                   "set SDM_LLM_ENDPOINT to enable engine=llm")
            client = LlmClient(config.llm_endpoint, config.llm_model)
            res = parse_with_llm(text, client)
        else:
            raise ServiceError(400, "bad_request",
                               f"unknown engine {engine!r}; use grammar or llm")
        if not res.ok:
            raise ServiceError(422, "parse_failure",
                               "command could not be parsed", res.failure)
        return {"structured": res.structured.to_dict(),
                "source": res.source, "raw": res.raw}

    @app.post("/sessions/{session_id}/generate")
    def generate(session_id: str, payload: dict = Body(...)):
        s = _session(session_id)
        if app.state.net is None:
            raise ServiceError(409, "no_checkpoint",
                               "no trained checkpoint loaded",
                               "start the service with SDM_CHECKPOINT set")
        try:
            ftype = canonical_feature_type(str(payload.get("feature_type", "")))
        except UnknownFeatureType as exc:
            raise ServiceError(400, "unknown_feature_type", str(exc),
                               f"known types: {list(FEATURE_TYPES)}")
        seed = payload.get("seed_face_id")
        with s.lock:
            model = s.model
        if not isinstance(seed, int) or isinstance(seed, bool) \
                or not 1 <= seed <= model.num_faces:
            raise ServiceError(400, "bad_seed",
                               f"seed_face_id must be in 1..{model.num_faces}",
                               f"got {seed!r}")
        try:
            result = generate_feature_faces(model, seed, ftype, app.state.net)
        except (GenerationError, UnknownFeatureType) as exc:
            raise ServiceError(400, "generation_failed", str(exc))
        return {"face_ids": sorted(result.face_ids),
                "raw_sequence": list(result.raw_sequence),
                "feature_type": ftype,
                "seed_face_id": seed}

    @app.post("/sessions/{session_id}/apply")
    def apply(session_id: str, payload: dict = Body(...)):
        s = _session(session_id)
        checked = validate_schema(payload.get("command"))
        if isinstance(checked, list):
            raise ServiceError(400, "schema_violation",
                               "command failed schema validation", checked)
        face_ids = payload.get("face_ids")
        if not isinstance(face_ids, list) or not face_ids \
                or not all(isinstance(i, int) and not isinstance(i, bool)
                           for i in face_ids):
            raise ServiceError(400, "bad_face_ids",
                               "'face_ids' must be a non-empty integer list")
        with s.lock:
            n = s.model.num_faces
            bad = [i for i in face_ids if not 1 <= i <= n]
            if bad:
                raise ServiceError(400, "bad_face_ids",
                                   f"face ids {bad} outside 1..{n}")
            try:
                ops = compile_api_calls(checked, face_ids)
                result = apply_sequence(s.model, ops)
                validate_model(result.model)
            except (EditError, MeshError) as exc:
                raise ServiceError(409, "edit_failed", str(exc))
            before = dumps_model(s.model)
            s.undo.append(before)
            if len(s.undo) > UNDO_DEPTH:
                s.undo.pop(0)
            s.model = result.model
            summary = {"changed_face_ids": sorted(result.changed_face_ids),
                       "api_calls": result.api_calls,
                       "id_remap": result.id_remap}
            return {"summary": summary, "mesh": _mesh_payload(result.model)}

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        s = _session(session_id)
        with s.lock:
            if not s.undo:
                raise ServiceError(409, "undo_empty", "nothing to undo")
            snapshot = s.undo.pop()
            s.model = loads_model(snapshot)
            return {"mesh": json.loads(snapshot)}

    @app.get("/sessions/{session_id}/mesh")
    def mesh(session_id: str):
        s = _session(session_id)
        with s.lock:
            model = s.model
        return {"mesh": _mesh_payload(model)}

    return app


def run(config: Optional[ServiceConfig] = None, host: str = "127.0.0.1"):
    import uvicorn

    config = config or ServiceConfig.from_env()
    uvicorn.run(create_app(config), host=host, port=config.port)
