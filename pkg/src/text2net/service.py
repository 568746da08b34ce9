"""HTTP service exposing sessions, dialog, topology and queries.

Thin adapter over the orchestrator: all state lives in the session store,
handlers only translate HTTP to events. A server-sent event stream per
session pushes transcript updates to the web UI.
"""

from __future__ import annotations

import argparse
import json
import queue
import threading
import uuid
from concurrent.futures import Future, ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from .adapters import AdapterConfig
from .orchestrator import (
    IllegalEventError,
    Phase,
    Query,
    Reply,
    SessionStore,
    SubmitScenario,
    SystemEvent,
)
from .topology import SCHEMA_VERSION


class CreateSessionRequest(BaseModel):
    backend: str = "sim"


class MessageRequest(BaseModel):
    text: str


class QueryRequest(BaseModel):
    command: str


class EventBus:
    """Per-session fan-out of system events to SSE subscribers."""

    def __init__(self) -> None:
        self._subscribers: dict[str, list[queue.Queue]] = {}
        self._lock = threading.Lock()

    def subscribe(self, session_id: str) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.setdefault(session_id, []).append(q)
        return q

    def unsubscribe(self, session_id: str, q: queue.Queue) -> None:
        with self._lock:
            subscribers = self._subscribers.get(session_id, [])
            if q in subscribers:
                subscribers.remove(q)

    def publish(self, session_id: str, event: SystemEvent) -> None:
        with self._lock:
            subscribers = list(self._subscribers.get(session_id, []))
        for q in subscribers:
            q.put(event.to_dict())


def create_app(
    store: SessionStore | None = None,
    adapter_config: AdapterConfig | None = None,
    provisioner_factory=None,
    message_timeout: float = 10.0,
    cors_origins: list[str] | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    store = store or SessionStore()
    adapter_config = adapter_config or AdapterConfig()
    bus = EventBus()
    executor = ThreadPoolExecutor(max_workers=8)
    pending: dict[str, Future] = {}

    app = FastAPI(title="text2net", version="0.1.0")
    app.state.store = store
    app.state.bus = bus
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _resource(state) -> dict:
        return state.to_dict()

    @app.post("/api/sessions", status_code=201)
    def create_session(request: CreateSessionRequest) -> JSONResponse:
        if request.backend not in ("sim", "eve"):
            return JSONResponse(
                {"error": f"unknown backend {request.backend!r}"}, status_code=400
            )
        provisioner = provisioner_factory(request.backend) if provisioner_factory else None
        state, welcome = store.create(
            backend=request.backend,
            adapter_config=adapter_config,
            provisioner=provisioner,
        )
        bus.publish(state.session_id, welcome)
        return JSONResponse(_resource(state), status_code=201)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str) -> JSONResponse:
        state = store.get(session_id)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        return JSONResponse(_resource(state))

    def _dispatch(session_id: str, event) -> JSONResponse:
        try:
            _, out = store.handle(session_id, event)
        except KeyError:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        except IllegalEventError as exc:
            return JSONResponse({"error": str(exc)}, status_code=409)
        bus.publish(session_id, out)
        body = out.to_dict()
        if out.payload:
            body.update(out.payload)
        return JSONResponse(body)

    @app.post("/api/sessions/{session_id}/message")
    def post_message(session_id: str, request: MessageRequest) -> JSONResponse:
        state = store.get(session_id)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        if state.phase == Phase.AWAITING_CLARIFICATION:
            event = Reply(request.text)
        else:
            event = SubmitScenario(request.text)
        future = executor.submit(_dispatch, session_id, event)
        try:
            return future.result(timeout=message_timeout)
        except FutureTimeout:
            token = uuid.uuid4().hex
            pending[token] = future
            return JSONResponse({"poll": token}, status_code=202)

    @app.get("/api/sessions/{session_id}/poll/{token}")
    def poll(session_id: str, token: str) -> JSONResponse:
        future = pending.get(token)
        if future is None:
            return JSONResponse({"error": "unknown poll token"}, status_code=404)
        if not future.done():
            return JSONResponse({"poll": token}, status_code=202)
        pending.pop(token, None)
        return future.result()

    @app.get("/api/sessions/{session_id}/topology")
    def get_topology(session_id: str) -> Response:
        state = store.get(session_id)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        if state.phase != Phase.PROVISIONED or state.topology is None:
            return JSONResponse({"error": "session is not provisioned"}, status_code=409)
        return Response(
            content=state.topology.to_json(),
            media_type="application/json",
            headers={"X-T2N-Schema": SCHEMA_VERSION},
        )

    @app.post("/api/sessions/{session_id}/query")
    def post_query(session_id: str, request: QueryRequest) -> JSONResponse:
        return _dispatch(session_id, Query(request.command))

    @app.get("/api/sessions/{session_id}/events")
    def events(session_id: str) -> StreamingResponse:
        state = store.get(session_id)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        q = bus.subscribe(session_id)

        def stream():
            try:
                # replay the transcript so late subscribers see history
                for entry in list(state.history):
                    if entry["role"] == "system":
                        payload = {"event": entry["event"], "text": entry["text"]}
                        yield f"data: {json.dumps(payload)}\n\n"
                while True:
                    try:
                        item = q.get(timeout=15.0)
                    except queue.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    yield f"data: {json.dumps(item)}\n\n"
            finally:
                bus.unsubscribe(session_id, q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="t2n-serve", description="Run the text2net service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--adapter", choices=("rules", "replay", "http"), default="rules")
    parser.add_argument("--fixtures", help="replay fixture directory")
    parser.add_argument("--llm-endpoint", help="chat endpoint for the http adapter")
    parser.add_argument("--llm-model")
    parser.add_argument("--ui-dir", help="serve this static directory at /")
    parser.add_argument("--cors-origin", action="append", dest="cors_origins")
    args = parser.parse_args(argv)

    if args.adapter == "replay":
        from .prompts import bundled_replay_dir

        adapter_config = AdapterConfig(
            backend="replay", fixture_path=args.fixtures or bundled_replay_dir()
        )
    elif args.adapter == "http":
        adapter_config = AdapterConfig(
            backend="http", endpoint_url=args.llm_endpoint, model_name=args.llm_model
        )
    else:
        adapter_config = AdapterConfig(backend="rules")

    app = create_app(
        adapter_config=adapter_config,
        cors_origins=args.cors_origins,
        ui_dir=args.ui_dir,
    )
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
