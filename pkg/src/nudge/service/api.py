"""HTTP/WS surface for the dashboard.

Endpoints:
  GET  /status                      current session counters
  GET  /config / PUT /config       runtime configuration (422 on bad ranges)
  POST /session/start              start a live session
  POST /session/{id}/stop          stop it, returns the summary
  GET  /sessions                    session records
  GET  /events                      filtered event query
  WS   /stream                      one JSON message per pipeline event
"""

import asyncio
import json

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from ..errors import NudgeError, StartupError
from ..nnet import load_model
from ..store import EventLog
from .config import ServiceConfig
from .pipeline import LiveSession, PushSource, SessionStatus, model_classifier


class ServiceState:
    def __init__(self, cfg: ServiceConfig, log: EventLog, classifier=None,
                 device_factory=None):
        self.cfg = cfg
        self.log = log
        self.classifier = classifier
        self.device_factory = device_factory
        self.session: LiveSession | None = None
        self.source: PushSource | None = None
        self.subscribers: list[tuple[asyncio.AbstractEventLoop, asyncio.Queue]] = []

    def broadcast(self, event: dict) -> None:
        for loop, q in list(self.subscribers):
            loop.call_soon_threadsafe(q.put_nowait, event)

    def make_classifier(self):
        if self.classifier is not None:
            return self.classifier
        try:
            model = load_model(self.cfg.model_path)
        except OSError as e:
            raise StartupError(f"cannot load model {self.cfg.model_path!r}: {e}") from e
        return model_classifier(model, self.cfg.chunk_threshold)

    def start_session(self) -> str:
        if self.session is not None:
            raise StartupError("a session is already running")
        classifier = self.make_classifier()
        device = None
        if self.cfg.device:
            if self.device_factory is None:
                from ..actuator.transport import DeviceClient
                device = DeviceClient(self.cfg.device)
            else:
                device = self.device_factory(self.cfg.device)
        self.source = PushSource()
        self.session = LiveSession(self.cfg, classifier, self.log, self.source,
                                   device, on_event=self.broadcast)
        return self.session.session_id

    def stop_session(self, session_id: str) -> dict:
        if self.session is None or self.session.session_id != session_id:
            raise KeyError(session_id)
        summary = self.session.stop()
        if self.session.core.device:
            self.session.core.device.close()
        self.session = None
        self.source = None
        return summary


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="nudge service")
    app.state.service = state

    @app.get("/status")
    def status():
        if state.session is None:
            return SessionStatus().to_dict()
        return state.session.core.status.to_dict()

    @app.get("/config")
    def get_config():
        return state.cfg.to_dict()

    @app.put("/config")
    def put_config(body: dict):
        if state.session is not None:
            raise HTTPException(409, "configuration is immutable while a session runs")
        try:
            state.cfg = ServiceConfig.from_dict(body)
        except (ValueError, TypeError) as e:
            return JSONResponse(status_code=422, content={"detail": str(e)})
        return state.cfg.to_dict()

    @app.post("/session/start")
    def session_start():
        try:
            return {"session_id": state.start_session()}
        except NudgeError as e:
            raise HTTPException(400, str(e))

    @app.post("/session/{session_id}/stop")
    def session_stop(session_id: str):
        try:
            return {"session_id": session_id, "summary": state.stop_session(session_id)}
        except KeyError:
            raise HTTPException(404, f"no running session {session_id!r}")

    @app.get("/sessions")
    def sessions():
        return state.log.sessions()

    @app.get("/events")
    def events(session_id: str, kind: str | None = None,
               from_ms: int | None = None, to_ms: int | None = None):
        return state.log.query_events(session_id, kind, from_ms, to_ms)

    @app.websocket("/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        loop = asyncio.get_running_loop()
        q: asyncio.Queue = asyncio.Queue()
        sub = (loop, q)
        state.subscribers.append(sub)
        try:
            while True:
                event = await q.get()
                await ws.send_text(json.dumps(event, separators=(",", ":")))
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            if sub in state.subscribers:
                state.subscribers.remove(sub)

    return app
