"""HTTP session service for interactive reporting over a learned system.

A session holds one feature vector and the attributes its owner has chosen
to disclose so far.  The service only ever offers disclosures that lead to
a surviving (certified) option — pruned branches are structurally absent,
not merely discouraged — and finalizing is available at every state, so
opting out is never removed.  Sessions live in memory, are touched under a
per-session lock, and expire after an idle timeout; feature vectors are
never persisted beyond session life.

Wire format (JSON bodies):

* ``POST /sessions {"features": [..]}``        -> 201 session + preview + options
* ``GET  /sessions/{id}/options``              -> current options
* ``POST /sessions/{id}/report {"attribute", "level"}`` -> advance one disclosure
* ``POST /sessions/{id}/finalize``             -> prediction + provenance
* ``GET  /system``                             -> public tree + gains, no parameters
* ``GET  /health``                             -> liveness

Gains ride as ``{metric, gain, p_value, n_validation}`` — raw numbers;
rounding for display is the client's job.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable

import numpy as np

from .assembly import ParticipatorySystem
from .dataset import ReportingGroup
from .models import predict_single

__all__ = ["SessionStore", "make_server", "serve_forever", "DEFAULT_TTL_SECONDS"]

DEFAULT_TTL_SECONDS = 15 * 60


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class Session:
    id: str
    features: np.ndarray
    reported: ReportingGroup
    created_at: float
    last_touched: float
    history: list = field(default_factory=list)
    finalized: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)


def _gain_payload(system: ParticipatorySystem, node: ReportingGroup) -> dict | None:
    cert = system.certificates.get(node)
    if cert is None:
        return None
    return {
        "metric": cert.metric,
        "gain": cert.gain,
        "p_value": cert.p_value,
        "n_validation": cert.n_validation,
    }


class SessionStore:
    """All mutable service state: sessions keyed by opaque id.

    The system itself is immutable and shared across handler threads; the
    store's own lock guards only the session table, and each session's
    lock guards that session's fields.
    """

    def __init__(
        self,
        system: ParticipatorySystem,
        ttl_seconds: float = DEFAULT_TTL_SECONDS,
        clock: Callable[[], float] | None = None,
    ):
        import time

        self.system = system
        self.ttl = float(ttl_seconds)
        self.clock = clock or time.monotonic
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    # -- session life ----------------------------------------------------

    def _expire_locked(self, now: float) -> None:
        dead = [
            sid
            for sid, s in self._sessions.items()
            if now - s.last_touched > self.ttl
        ]
        for sid in dead:
            del self._sessions[sid]

    def _get(self, session_id: str) -> Session:
        now = self.clock()
        with self._lock:
            self._expire_locked(now)
            session = self._sessions.get(session_id)
            if session is None:
                raise ServiceError(404, "unknown or expired session")
            session.last_touched = now
            return session

    def create_session(self, payload) -> dict:
        system = self.system
        if not isinstance(payload, dict) or "features" not in payload:
            raise ServiceError(400, "body must be an object with a 'features' list")
        raw = payload["features"]
        width = len(system.provenance.get("feature_names", ()))
        if not isinstance(raw, list) or len(raw) != width:
            raise ServiceError(400, f"features must be a list of {width} numbers")
        try:
            features = np.asarray([float(v) for v in raw], dtype=np.float64)
        except (TypeError, ValueError):
            raise ServiceError(400, "features must be numbers")
        if not np.all(np.isfinite(features)):
            raise ServiceError(400, "features must be finite")
        now = self.clock()
        session = Session(
            id=uuid.uuid4().hex,
            features=features,
            reported=ReportingGroup.root(system.schema.k),
            created_at=now,
            last_touched=now,
        )
        with self._lock:
            self._expire_locked(now)
            self._sessions[session.id] = session
        return {
            "session_id": session.id,
            "prediction": self._preview(session),
            "options": self._options(session),
        }

    # -- views -----------------------------------------------------------

    def _node_of(self, session: Session) -> ReportingGroup:
        return self.system.dispatch(session.reported)

    def _entries_payload(self, r: ReportingGroup) -> list:
        schema = self.system.schema
        return [
            None if e is None else schema.levels[i][e]
            for i, e in enumerate(r.entries)
        ]

    def _preview(self, session: Session) -> dict:
        system = self.system
        node = self._node_of(session)
        model = system.models[system.model_ids[node]]
        score = predict_single(model, system.schema, session.features, session.reported)
        return {
            "score": score,
            "label": int(score >= 0.5),
            "node": self._entries_payload(node),
            "model_id": model.id,
        }

    def _options(self, session: Session) -> list[dict]:
        """Disclosure steps from here that lead to a surviving option."""
        system = self.system
        schema = system.schema
        node = self._node_of(session)
        r = session.reported
        out = []
        for child in system.surviving_children(node):
            if not child.consistent_with(r):
                continue
            added = [
                {"attribute": schema.attributes[i], "level": schema.levels[i][e]}
                for i, e in enumerate(child.entries)
                if e is not None and r.entries[i] is None
            ]
            if not added:
                continue
            out.append(
                {
                    "node": self._entries_payload(child),
                    "added": added,
                    "gain": _gain_payload(system, child),
                }
            )
        return out

    # -- actions ----------------------------------------------------------

    def get_options(self, session_id: str) -> dict:
        session = self._get(session_id)
        with session.lock:
            return {
                "session_id": session.id,
                "finalized": session.finalized,
                "prediction": self._preview(session),
                "options": self._options(session),
            }

    def report(self, session_id: str, payload) -> dict:
        if not isinstance(payload, dict) or not {"attribute", "level"} <= payload.keys():
            raise ServiceError(400, "body must carry 'attribute' and 'level'")
        system = self.system
        schema = system.schema
        try:
            attr = schema.attribute_index(str(payload["attribute"]))
            level = schema.level_index(attr, str(payload["level"]))
        except Exception:
            raise ServiceError(422, "no such attribute or level")
        session = self._get(session_id)
        with session.lock:
            if session.finalized:
                raise ServiceError(409, "session already finalized")
            if session.reported.entries[attr] is not None:
                raise ServiceError(422, "attribute already reported")
            offered = False
            for option in self._options(session):
                if any(
                    a["attribute"] == schema.attributes[attr] and a["level"] == schema.levels[attr][level]
                    for a in option["added"]
                ):
                    offered = True
                    break
            if not offered:
                raise ServiceError(422, "that disclosure is not an available option")
            session.reported = session.reported.extend(attr, level)
            session.history.append(
                {
                    "attribute": schema.attributes[attr],
                    "level": schema.levels[attr][level],
                    "at": self.clock(),
                }
            )
            return {
                "session_id": session.id,
                "finalized": False,
                "prediction": self._preview(session),
                "options": self._options(session),
            }

    def finalize(self, session_id: str) -> dict:
        system = self.system
        session = self._get(session_id)
        with session.lock:
            if session.finalized:
                raise ServiceError(409, "session already finalized")
            session.finalized = True
            node = self._node_of(session)
            prediction = self._preview(session)
            chain = [
                {
                    "node": self._entries_payload(step),
                    "model_id": system.model_ids[step],
                    "gain": _gain_payload(system, step),
                }
                for step in system.tree.path_to(node)
            ]
            return {
                "session_id": session.id,
                "finalized": True,
                "prediction": prediction,
                "serving_node": self._entries_payload(node),
                "model_id": system.model_ids[node],
                "certificate_chain": chain,
            }

    def system_view(self) -> dict:
        return self.system.public_view()

    def health(self) -> dict:
        return {"status": "ok", "system": self.system.name}


def _json_bytes(payload) -> bytes:
    return (json.dumps(payload) + "\n").encode("utf-8")


class _Handler(BaseHTTPRequestHandler):
    server_version = "partsys"
    protocol_version = "HTTP/1.1"

    @property
    def store(self) -> SessionStore:
        return self.server.store  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):  # route access logs through logging
        import logging

        logging.getLogger(__name__).debug(fmt, *args)

    def _respond(self, status: int, payload) -> None:
        body = _json_bytes(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._respond(status, {"error": message})

    def _body(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise ServiceError(400, "body is not valid JSON")

    def do_OPTIONS(self):  # CORS preflight
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            if parts == ["health"]:
                return self._respond(200, self.store.health())
            if parts == ["system"]:
                return self._respond(200, self.store.system_view())
            if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "options":
                return self._respond(200, self.store.get_options(parts[1]))
            return self._error(404, "no such resource")
        except ServiceError as exc:
            return self._error(exc.status, exc.message)

    def do_POST(self):
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            payload = self._body()
            if parts == ["sessions"]:
                return self._respond(201, self.store.create_session(payload))
            if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "report":
                return self._respond(200, self.store.report(parts[1], payload))
            if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "finalize":
                return self._respond(200, self.store.finalize(parts[1]))
            return self._error(404, "no such resource")
        except ServiceError as exc:
            return self._error(exc.status, exc.message)


def make_server(
    system: ParticipatorySystem,
    host: str = "127.0.0.1",
    port: int = 8347,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
    clock: Callable[[], float] | None = None,
) -> ThreadingHTTPServer:
    """Bind and return the server without starting it (caller owns shutdown)."""
    server = ThreadingHTTPServer((host, port), _Handler)
    server.store = SessionStore(system, ttl_seconds, clock)  # type: ignore[attr-defined]
    return server


def serve_forever(
    system: ParticipatorySystem,
    host: str = "127.0.0.1",
    port: int = 8347,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
) -> None:
    server = make_server(system, host, port, ttl_seconds)
    try:
        server.serve_forever()
    finally:
        server.server_close()
