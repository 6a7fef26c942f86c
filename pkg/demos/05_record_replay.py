"""Determinism: record a live session, replay it, compare the bytes.

Demonstrates:
- a closed-loop session recording its gaze trace while it runs
- serializing trace and event log to JSON lines
- replaying the trace through the headless runner and getting the
  byte-identical event log back

Run: python3 demos/05_record_replay.py
"""
from gazeguide import MIXED, make_viktoria_scene, parse_trace, run_headless, serialize_trace
from gazeguide.raycast import MeshIndex
from gazeguide.sim import RandomGazeAgent, run_with_agent

scene = make_viktoria_scene()
index = MeshIndex(scene.mesh)

# live run: a seeded visitor explores in mixed mode, trace recorded as it goes
agent = RandomGazeAgent(scene, seed=2024, index=index, retarget_ticks=280, chase_bias=0.9)
engine, trace = run_with_agent(scene, MIXED, agent, max_ticks=60 * 200, index=index)
live_log = engine.log_text()
print(f"live run: {engine.tick} ticks, {len(engine.log)} events, "
      f"completed={engine.completed}")

# file round trip
trace_text = serialize_trace(trace)
print(f"trace file: {len(trace_text.splitlines())} lines, {len(trace_text)} bytes")
restored = parse_trace(trace_text)
assert restored == trace and serialize_trace(restored) == trace_text
print("trace round-trips byte-identically")

# replay through the headless pipeline
replay_log, report = run_headless(scene, MIXED, restored, index=index)
assert replay_log == live_log
print(f"replayed event log: {len(replay_log)} bytes -> byte-identical to the live run")

# the same seed reproduces the whole session from nothing
agent2 = RandomGazeAgent(scene, seed=2024, index=index, retarget_ticks=280, chase_bias=0.9)
engine2, _ = run_with_agent(scene, MIXED, agent2, max_ticks=60 * 200, index=index)
assert engine2.log_text() == live_log
print("re-running the same seed reproduces the identical log")
print("\ndeliveries:", " -> ".join(report.delivered_units()))
