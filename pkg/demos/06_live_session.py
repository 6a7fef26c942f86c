"""The session server, driven as a client would drive it.

Demonstrates:
- listing scenarios over HTTP and fetching the mesh
- a websocket session: hello -> ready, streamed gaze -> streamed frames
- frames carrying puck position, cue, dwell fraction, and the tick's events
- that the stream equals the headless run of the same samples

Run: python3 demos/06_live_session.py
"""
import json

from fastapi.testclient import TestClient

from gazeguide import GUIDED, run_headless, serialize_events
from gazeguide.events import Event
from gazeguide.service import ScenarioRegistry, create_app
from gazeguide.sim import Waypoint, scripted_generator

registry = ScenarioRegistry()
client = TestClient(create_app(registry))

print("GET /scenarios ->", client.get("/scenarios").json())
detail = client.get("/scenarios/viktoria").json()
print(f"viktoria: {len(detail['rois'])} rois, {len(detail['units'])} units, "
      f"modes {detail['modes']}")
mesh_text = client.get("/scenarios/viktoria/mesh.obj").text
print(f"mesh download: {len(mesh_text.splitlines())} OBJ lines")

# drive a guided session: rest through the intro, then obey the first cue
scene = registry.get("viktoria").scene
trace = scripted_generator(
    [Waypoint((0.0, 8.0, 0.0), hold=6.5), Waypoint(1, hold=5.0, transit=0.5)],
    scene, noise_sigma=0.0, seed=0, index=registry.get("viktoria").index,
)

frames = []
with client.websocket_connect("/session") as ws:
    ws.send_text(json.dumps({"type": "hello", "scenario": "viktoria", "mode": GUIDED}))
    ready = json.loads(ws.receive_text())
    print(f"\nhello -> {ready['type']}")
    for s in trace.samples:
        ws.send_text(json.dumps({
            "type": "gaze", "t": s.t,
            "pos": [float(v) for v in s.pose.position],
            "quat": [float(v) for v in s.pose.orientation],
        }))
    for _ in range(int(trace.samples[-1].t * 60) + 1):
        frames.append(json.loads(ws.receive_text()))

print(f"received {len(frames)} frames (one per engine tick)")
for f in frames:
    for e in f["events"]:
        print(f"  t={e['t'] / 60:6.2f}s  {e['type']:20s} {e['payload']}")
dwelling = [f for f in frames if f["dwell_fraction"] is not None]
print(f"dwell ring visible in {len(dwelling)} frames "
      f"(fills 0 -> 1 while the dwell timer runs)")

# transport adds nothing: the frame events equal the headless run
events = [Event(e["t"], e["type"], e["payload"]) for f in frames for e in f["events"]]
headless_log, _ = run_headless(scene, GUIDED, trace, index=registry.get("viktoria").index)
assert serialize_events(events, 60) == headless_log
print("frame stream == headless event log, byte for byte")
