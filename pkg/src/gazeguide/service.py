"""Live session server: streams gaze in, frames out.

One engine per connection. The client owns the clock: `gaze` messages carry
strictly increasing timestamps, the server resamples them onto the fixed
engine tick by sample-and-hold and answers with one `frame` per elapsed tick.
The transport adds no behaviour: a session fed the same samples as a recorded
trace produces exactly the run_headless event stream.

Endpoints: full-duplex JSON websocket at /session, scenario summaries under
/scenarios, and an optional static directory (the browser UI) at /.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .geometry import Pose6DoF, dump_mesh
from .mediation import MODES
from .raycast import MeshIndex
from .scenario import Scene, load_scene, make_viktoria_scene
from .sim import Engine


class ProtocolError(ValueError):
    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail


class ScenarioNotFound(KeyError):
    def __init__(self, scenario_id: str):
        super().__init__(scenario_id)
        self.scenario_id = scenario_id


@dataclass
class _Entry:
    scene: Scene
    index: MeshIndex


class ScenarioRegistry:
    """Shared, read-only scenes plus their acceleration indexes."""

    def __init__(self, scenario_dir: Optional[str | Path] = None, include_demo: bool = True):
        self._entries: dict[str, _Entry] = {}
        if include_demo:
            self.add(make_viktoria_scene())
        if scenario_dir is not None:
            for path in sorted(Path(scenario_dir).glob("*.scenario.json")):
                self.add(load_scene(path))

    def add(self, scene: Scene) -> None:
        self._entries[scene.scenario.scenario_id] = _Entry(scene, MeshIndex(scene.mesh))

    def ids(self) -> list[str]:
        return sorted(self._entries)

    def get(self, scenario_id: str) -> _Entry:
        try:
            return self._entries[scenario_id]
        except KeyError:
            raise ScenarioNotFound(scenario_id) from None

    def summary(self, scenario_id: str) -> dict:
        scene = self.get(scenario_id).scene
        s = scene.scenario
        return {
            "id": s.scenario_id,
            "rois": [
                {
                    "roi_id": c.roi_id,
                    "label": c.label,
                    "volumes": [
                        {"center": [float(x) for x in v.center], "radius": v.radius}
                        for v in c.volumes
                    ],
                    "highlight_triangles": sorted(c.highlight_triangles),
                }
                for c in sorted(s.colliders, key=lambda c: c.roi_id)
            ],
            "units": [
                {
                    "unit_id": u.unit_id,
                    "kind": u.kind,
                    "duration": u.duration,
                    "transcript": u.transcript,
                    "asset_refs": list(u.asset_refs),
                    "linked_roi": u.linked_roi,
                    "is_core": u.is_core,
                }
                for u in s.units
            ],
            "script": {
                "intro": s.script.intro,
                "conclusion": s.script.conclusion,
                "roi_units": {str(k): v for k, v in sorted(s.script.roi_units.items())},
                "guided_order": list(s.script.guided_order),
                "core_set": sorted(s.script.core_set),
            },
            "selection": {
                "hover_duration": s.selection.hover_duration,
                "dwell_duration": s.selection.dwell_duration,
                "exit_grace": s.selection.exit_grace,
                "tick": s.selection.tick,
            },
            "timeline": None
            if s.timeline is None
            else {
                "rows": [
                    {
                        "name": r.name,
                        "entries": [
                            {"year": e.year, "image_ref": e.image_ref, "caption": e.caption}
                            for e in r.entries
                        ],
                    }
                    for r in s.timeline.rows
                ]
            },
            "modes": list(MODES),
            "tick_rate": s.selection.tick_rate,
            "mesh_url": f"/scenarios/{s.scenario_id}/mesh.obj",
            "virtual_triangles": [int(i) for i in np.nonzero(scene.mesh.triangle_source)[0]],
        }


class Session:
    """Message-serial protocol state machine for one connection.

    handle() maps one incoming message to zero or more outgoing messages and
    never touches a socket, so the protocol is testable without transport.
    """

    def __init__(self, registry: ScenarioRegistry):
        self.registry = registry
        self.engine: Optional[Engine] = None
        self.scenario_id: Optional[str] = None
        self.mode: Optional[str] = None
        self.closed = False
        self._last_t: Optional[float] = None
        self._held: Optional[tuple[float, Pose6DoF]] = None
        self._pending: list[tuple[float, Pose6DoF]] = []

    def _fail(self, code: str, detail: str) -> list[dict]:
        self.closed = True
        return [{"type": "error", "code": code, "detail": detail}]

    def handle(self, msg: dict) -> list[dict]:
        if self.closed:
            return []
        kind = msg.get("type")
        if kind == "hello":
            return self._on_hello(msg)
        if kind == "gaze":
            return self._on_gaze(msg)
        if kind == "reset":
            return self._on_reset()
        return self._fail("unknown_type", f"unsupported message type {kind!r}")

    def _on_hello(self, msg: dict) -> list[dict]:
        if self.engine is not None:
            return self._fail("protocol", "hello after session start")
        scenario_id = msg.get("scenario")
        mode = msg.get("mode")
        if mode not in MODES:
            return self._fail("bad_mode", f"mode must be one of {list(MODES)}")
        try:
            entry = self.registry.get(scenario_id)
        except ScenarioNotFound:
            return self._fail("scenario_not_found", f"unknown scenario {scenario_id!r}")
        self.scenario_id = scenario_id
        self.mode = mode
        self.engine = Engine(entry.scene, mode, index=entry.index)
        return [{"type": "ready", "scenario": self.registry.summary(scenario_id)}]

    def _on_reset(self) -> list[dict]:
        if self.engine is None:
            return self._fail("protocol", "reset before hello")
        entry = self.registry.get(self.scenario_id)
        self.engine = Engine(entry.scene, self.mode, index=entry.index)
        self._last_t = None
        self._held = None
        self._pending = []
        return [{"type": "ready", "scenario": self.registry.summary(self.scenario_id)}]

    def _on_gaze(self, msg: dict) -> list[dict]:
        if self.engine is None:
            return self._fail("protocol", "gaze before hello")
        try:
            t = float(msg["t"])
            pose = Pose6DoF(
                np.array([float(v) for v in msg["pos"]]),
                np.array([float(v) for v in msg["quat"]]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            return self._fail("bad_gaze", str(exc))
        if self._last_t is not None and t <= self._last_t:
            return self._fail("non_monotone_time", f"t {t} after {self._last_t}")
        self._last_t = t
        self._pending.append((t, pose))

        # run every engine tick covered by the client clock so far
        frames = []
        dt = self.engine.cfg.tick
        while self.engine.tick * dt <= t:
            tick = self.engine.tick
            while self._pending and self._pending[0][0] <= tick * dt:
                self._held = self._pending.pop(0)
            pose_for_tick = self._held[1] if self._held is not None else None
            events = self.engine.step(pose_for_tick)
            frames.append(self._frame(tick, events))
        return frames

    def _frame(self, tick: int, events) -> dict:
        puck = None
        if self.engine.puck.display_point is not None:
            puck = {
                "point": [float(v) for v in self.engine.puck.display_point],
                "normal": [float(v) for v in self.engine.puck.display_normal],
                "on_surface": self.engine.puck.current_hit is not None,
            }
        return {
            "type": "frame",
            "t": tick,
            "puck": puck,
            "gazed_roi": self.engine.gazed_roi,
            "cue": self.engine.cue,
            "dwell_fraction": self.engine.dwell_fraction(),
            "events": [{"t": e.t, "type": e.type, "payload": e.payload} for e in events],
        }


def create_app(registry: Optional[ScenarioRegistry] = None, static_dir: Optional[str | Path] = None):
    """FastAPI application exposing /scenarios, /session, and the UI bundle."""
    registry = registry or ScenarioRegistry()
    app = FastAPI(title="gazeguide session server")

    @app.get("/scenarios")
    def list_scenarios():
        return [
            {
                "id": sid,
                "rois": len(registry.get(sid).scene.colliders),
                "units": len(registry.get(sid).scene.scenario.units),
            }
            for sid in registry.ids()
        ]

    @app.get("/scenarios/{scenario_id}")
    def scenario_detail(scenario_id: str):
        try:
            return registry.summary(scenario_id)
        except ScenarioNotFound:
            raise HTTPException(status_code=404, detail=f"unknown scenario {scenario_id!r}")

    @app.get("/scenarios/{scenario_id}/mesh.obj")
    def scenario_mesh(scenario_id: str):
        try:
            entry = registry.get(scenario_id)
        except ScenarioNotFound:
            raise HTTPException(status_code=404, detail=f"unknown scenario {scenario_id!r}")
        return PlainTextResponse(dump_mesh(entry.scene.mesh), media_type="text/plain")

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        session = Session(registry)
        try:
            while not session.closed:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError as exc:
                    for reply in session._fail("bad_json", str(exc)):
                        await ws.send_text(json.dumps(reply, separators=(",", ":")))
                    break
                for reply in session.handle(msg):
                    await ws.send_text(json.dumps(reply, separators=(",", ":")))
        except WebSocketDisconnect:
            pass
        finally:
            if session.closed:
                try:
                    await ws.close()
                except RuntimeError:
                    pass

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(port: int = 8000, host: str = "127.0.0.1",
          scenario_dir: Optional[str] = None, static_dir: Optional[str] = None):
    import uvicorn

    app = create_app(ScenarioRegistry(scenario_dir), static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
