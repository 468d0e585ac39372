"""HTTP API consumed by the operator console and other clients.

Endpoints:
    POST /sessions                      {"scene": snapshot} or {"world": spec}
    POST /sessions/{id}/utterance       {"text": str, "t": float}
    POST /sessions/{id}/skeleton        {"joints": {name: [x,y,z]}, "t": float}
    GET  /sessions/{id}/state
    GET  /sessions/{id}/events          server-sent events; ?after=, ?limit=, ?timeout=
    POST /scenarios/{name}/replay

Event messages are versioned JSON with a monotone per-session ``seq`` so
clients can buffer and reorder.
"""

from __future__ import annotations

import json
import queue

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .config import EngineConfig
from .errors import EngineError, UnknownTarget
from .orchestrator import SessionService, bundled_scenario, replay
from .scene import scene_from_snapshot, scene_to_snapshot
from .segmentation import WorldSpec


class CreateSessionBody(BaseModel):
    scene: dict | None = None
    world: dict | None = None


class UtteranceBody(BaseModel):
    text: str
    t: float


class SkeletonBody(BaseModel):
    joints: dict[str, list[float]]
    t: float


def create_app(config: EngineConfig | None = None, service: SessionService | None = None) -> FastAPI:
    service = service or SessionService(config or EngineConfig())
    app = FastAPI(title="deskpilot", version="1")
    app.state.service = service

    def _session_or_404(session_id: str):
        try:
            return service.get(session_id)
        except UnknownTarget as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            scene = scene_from_snapshot(body.scene) if body.scene else None
            world = WorldSpec.from_dict(body.world) if body.world else None
            session = service.create_session(scene=scene, world=world)
        except EngineError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"id": session.id, "scene": scene_to_snapshot(session.scene)}

    @app.post("/sessions/{session_id}/utterance")
    def post_utterance(session_id: str, body: UtteranceBody):
        _session_or_404(session_id)
        try:
            events = service.ingest_utterance(session_id, body.text, body.t)
        except EngineError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"events": events}

    @app.post("/sessions/{session_id}/skeleton")
    def post_skeleton(session_id: str, body: SkeletonBody):
        _session_or_404(session_id)
        try:
            events = service.ingest_skeleton(session_id, body.joints, body.t)
        except EngineError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"events": events}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        _session_or_404(session_id)
        return service.state_dict(session_id)

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str, after: int = 0, limit: int = 0, timeout: float = 10.0):
        _session_or_404(session_id)

        def stream():
            sent = 0
            last = after
            # subscribe before reading the backlog so no event falls in the
            # gap; the live loop then skips what the backlog already carried
            subscription = service.subscribe(session_id)
            try:
                for event in service.events_after(session_id, after):
                    yield f"id: {event['seq']}\ndata: {json.dumps(event, sort_keys=True)}\n\n"
                    last = event["seq"]
                    sent += 1
                    if limit and sent >= limit:
                        return
                while True:
                    try:
                        event = subscription.get(timeout=timeout)
                    except queue.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    if event["seq"] <= last:
                        continue
                    yield f"id: {event['seq']}\ndata: {json.dumps(event, sort_keys=True)}\n\n"
                    last = event["seq"]
                    sent += 1
                    if limit and sent >= limit:
                        return
            finally:
                service.unsubscribe(session_id, subscription)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.post("/scenarios/{name}/replay")
    def replay_scenario(name: str):
        try:
            scenario = bundled_scenario(name)
        except UnknownTarget as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return replay(scenario, service.config, planner=service.planner)

    return app
