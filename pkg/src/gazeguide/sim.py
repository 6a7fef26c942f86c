"""Synthetic gaze generators and the headless end-to-end runner.

Everything runs on one global 60 Hz tick: generators emit samples at tick
times, the engine consumes one pose per tick, and event logs timestamp with
tick indices, so a recorded run replays bit-for-bit. Randomness comes from
numpy's PCG64 generator seeded explicitly, which is stable across platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .events import (
    CONTENT_FINISHED,
    CONTENT_STARTED,
    SESSION_COMPLETED,
    Event,
    serialize_events,
)
from .geometry import ColliderSet, Pose6DoF, PuckState, look_at_quaternion, normalized, puck_step
from .interaction import Idle, SelectionPhase, dwell_fraction, selection_step, start_delivery
from .mediation import MediationState, initial_state, mediation_step
from .raycast import MeshIndex
from .scenario import Scene
from .trace import GazeSample, GazeTrace

STANDOFF = 2.0  # metres between a generated eye point and its target


class UnknownRoi(KeyError):
    def __init__(self, roi):
        super().__init__(f"roi {roi} is not in the scenario")
        self.roi = roi


@dataclass(frozen=True)
class Waypoint:
    """Aim at `target` (roi id or explicit point) for `hold` seconds after a
    `transit` seconds blend from the previous waypoint."""

    target: Union[int, tuple[float, float, float]]
    hold: float
    transit: float = 0.0

    def __post_init__(self):
        if self.hold < 0 or self.transit < 0:
            raise ValueError("hold and transit must be >= 0")


def _slerp(q0: np.ndarray, q1: np.ndarray, s: float) -> np.ndarray:
    dot = float(q0 @ q1)
    if dot < 0.0:
        q1 = -q1
        dot = -dot
    if dot > 0.9995:
        q = q0 + (q1 - q0) * s
        return q / float(np.sqrt(q @ q))
    theta = math.acos(min(1.0, dot))
    a = math.sin((1.0 - s) * theta) / math.sin(theta)
    b = math.sin(s * theta) / math.sin(theta)
    return q0 * a + q1 * b


def _perturbed_look(eye: np.ndarray, target: np.ndarray, rng, sigma: float) -> Pose6DoF:
    d = normalized(target - eye)
    if sigma > 0.0:
        # small-angle perturbation in the plane orthogonal to the gaze
        ref = np.array([0.0, 1.0, 0.0]) if abs(d[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
        u = normalized(np.cross(ref, d))
        v = np.cross(d, u)
        a, b = rng.normal(0.0, sigma, 2)
        d = normalized(d + u * a + v * b)
    return Pose6DoF(eye, look_at_quaternion(d))


_APPROACH_ANGLES = [k * math.pi / 4.0 for k in range(8)]


def _radial_direction(point: np.ndarray) -> np.ndarray:
    horizontal = np.array([point[0], 0.0, point[2]])
    n = float(np.linalg.norm(horizontal))
    if n < 1e-9:
        return np.array([0.0, 0.0, 1.0])
    return horizontal / n


def approach_eye(scene: Scene, index: MeshIndex, roi_id: int, standoff: float = STANDOFF) -> np.ndarray:
    """An eye point `standoff` metres out from which a ray at the roi's
    collider centroid lands on surface inside the collider.

    Tries the outward radial direction first, then eight compass directions,
    all at the centroid's height; deterministic."""
    try:
        target = scene.roi_centroid(roi_id)
    except KeyError:
        raise UnknownRoi(roi_id) from None
    collider = scene.scenario.collider(roi_id)
    candidates = [_radial_direction(target)]
    candidates += [np.array([math.sin(a), 0.0, math.cos(a)]) for a in _APPROACH_ANGLES]
    for direction in candidates:
        eye = target + direction * standoff
        hit = index.cast(eye, normalized(target - eye))
        if hit is not None and collider.contains(hit.point):
            return eye
    raise RuntimeError(f"roi {roi_id}: no unobstructed approach found at {standoff} m")


def scripted_generator(
    waypoints: Sequence[Waypoint],
    scene: Scene,
    noise_sigma: float = 0.0,
    seed: int = 0,
    index: Optional[MeshIndex] = None,
) -> GazeTrace:
    """60 Hz trace visiting the waypoints: blend eye and aim over each
    transit, then hold on the target with N(0, sigma) angular noise."""
    if not waypoints:
        return GazeTrace(())
    index = index or MeshIndex(scene.mesh)
    rng = np.random.Generator(np.random.PCG64(seed))
    dt = scene.selection.tick

    resolved = []
    for wp in waypoints:
        if isinstance(wp.target, int):
            try:
                target = scene.roi_centroid(wp.target)
            except KeyError:
                raise UnknownRoi(wp.target) from None
            eye = approach_eye(scene, index, wp.target)
        else:
            target = np.asarray(wp.target, dtype=np.float64)
            eye = target + _radial_direction(target) * STANDOFF
        resolved.append((eye, target, wp))

    samples: list[GazeSample] = []
    tick = 0
    prev: Optional[tuple[np.ndarray, np.ndarray]] = None
    for eye, target, wp in resolved:
        if prev is not None and wp.transit > 0:
            transit_ticks = round(wp.transit / dt)
            q0 = look_at_quaternion(normalized(prev[1] - prev[0]))
            q1 = look_at_quaternion(normalized(target - eye))
            for k in range(transit_ticks):
                s = (k + 1) / (transit_ticks + 1)
                pos = prev[0] + (eye - prev[0]) * s
                samples.append(GazeSample(tick * dt, Pose6DoF(pos, _slerp(q0, q1, s))))
                tick += 1
        for _ in range(round(wp.hold / dt)):
            samples.append(GazeSample(tick * dt, _perturbed_look(eye, target, rng, noise_sigma)))
            tick += 1
        prev = (eye, target)
    return GazeTrace(tuple(samples))


def orbit_generator(
    radius: float,
    angular_speed: float,
    height: float,
    duration: float,
    seed: int = 0,
    noise_sigma: float = 0.0,
    aim_height: Optional[float] = None,
) -> GazeTrace:
    """Circular walk around the scenario origin, gaze on the statue axis."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    dt = 1.0 / 60.0
    aim = np.array([0.0, height if aim_height is None else aim_height, 0.0])
    samples = []
    for k in range(round(duration / dt)):
        t = k * dt
        theta = angular_speed * t
        eye = np.array([radius * math.sin(theta), height, radius * math.cos(theta)])
        samples.append(GazeSample(t, _perturbed_look(eye, aim, rng, noise_sigma)))
    return GazeTrace(tuple(samples))


# --- the end-to-end engine --------------------------------------------------

@dataclass
class RunReport:
    mode: str
    deliveries: list[tuple[str, int, int]]  # unit, started tick, finished tick
    completion: bool
    total_ticks: int
    tick_rate: int
    roi_ticks: dict[int, int]

    @property
    def total_seconds(self) -> float:
        return self.total_ticks / self.tick_rate

    def delivered_units(self) -> list[str]:
        return [unit for unit, _, _ in self.deliveries]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "deliveries": [
                {"unit": u, "started_tick": s, "finished_tick": f}
                for u, s, f in self.deliveries
            ],
            "completion": self.completion,
            "total_ticks": self.total_ticks,
            "tick_rate": self.tick_rate,
            "total_seconds": self.total_seconds,
            "roi_seconds": {str(r): t / self.tick_rate for r, t in sorted(self.roi_ticks.items())},
        }


class Engine:
    """One session: ray cast -> containment -> selection -> mediation, one
    pose per tick. Holds no global state; run as many engines concurrently as
    you like over a shared Scene/MeshIndex."""

    def __init__(self, scene: Scene, mode: str, index: Optional[MeshIndex] = None):
        self.scene = scene
        self.mode = mode
        self.index = index or MeshIndex(scene.mesh)
        self.colliders = ColliderSet(scene.colliders)
        self.cfg = scene.selection
        self.units_by_roi = scene.units_by_roi()
        self.tick = 0
        self.phase: SelectionPhase = Idle()
        self.puck = PuckState()
        self.med: MediationState = initial_state()
        self.cue: Optional[int] = None
        self.enabled: frozenset[int] = frozenset()
        self.log: list[Event] = []
        self.roi_ticks: dict[int, int] = {c.roi_id: 0 for c in scene.colliders}
        self.deliveries: list[tuple[str, int, int]] = []
        self._started_at: dict[str, int] = {}
        self.completed = False

    @property
    def gazed_roi(self) -> Optional[int]:
        return self._last_gazed

    _last_gazed: Optional[int] = None

    def step(self, pose: Optional[Pose6DoF]) -> list[Event]:
        """Advance one tick with the given head pose (None = no gaze data)."""
        hit = self.index.cast(*pose.ray()) if pose is not None else None
        gazed = self.colliders.lookup(hit.point) if hit is not None else None
        self._last_gazed = gazed
        if gazed is not None:
            self.roi_ticks[gazed] += 1

        phase, events = selection_step(
            self.phase,
            gazed,
            self.cue,
            self.enabled,
            self.cfg,
            self.cfg.tick,
            tick=self.tick,
            unit_for_roi=self.units_by_roi,
        )
        self.puck = puck_step(self.puck, hit, self.cfg.tick)
        med, directives = mediation_step(
            self.med, events, self.scene.script, self.mode, tick=self.tick
        )
        events = list(events) + list(directives.events)
        if directives.start_unit is not None:
            duration = self.scene.unit_duration_ticks(directives.start_unit)
            phase = start_delivery(directives.start_unit, duration, self.tick, events)

        for e in events:
            if e.type == CONTENT_STARTED:
                self._started_at[e.payload["unit"]] = e.t
            elif e.type == CONTENT_FINISHED:
                unit = e.payload["unit"]
                self.deliveries.append((unit, self._started_at.get(unit, e.t), e.t))
            elif e.type == SESSION_COMPLETED:
                self.completed = True

        self.phase = phase
        self.med = med
        self.cue = directives.cue
        self.enabled = directives.enabled
        self.log.extend(events)
        self.tick += 1
        return events

    def dwell_fraction(self) -> Optional[float]:
        return dwell_fraction(self.phase, self.cfg)

    def log_text(self) -> str:
        return serialize_events(self.log, self.cfg.tick_rate)

    def report(self) -> RunReport:
        return RunReport(
            mode=self.mode,
            deliveries=list(self.deliveries),
            completion=self.completed,
            total_ticks=self.tick,
            tick_rate=self.cfg.tick_rate,
            roi_ticks=dict(self.roi_ticks),
        )


def _tick_count(trace: GazeTrace, dt: float) -> int:
    """Ticks covered by the trace: every tick with tick*dt <= last sample time.
    An empty trace still runs one tick so the session opens (intro auto-play)."""
    if len(trace) == 0:
        return 1
    t_last = trace.samples[-1].t
    k = int(t_last / dt)
    while (k + 1) * dt <= t_last:
        k += 1
    while k > 0 and k * dt > t_last:
        k -= 1
    return k + 1


def pose_at_tick(trace: GazeTrace, times: np.ndarray, tick: int, dt: float) -> Optional[Pose6DoF]:
    """Sample-and-hold resampling: the last sample at or before tick*dt."""
    idx = int(np.searchsorted(times, tick * dt, side="right")) - 1
    if idx < 0:
        return None
    return trace.samples[idx].pose


def run_headless(
    scene: Scene, mode: str, trace: GazeTrace, index: Optional[MeshIndex] = None
) -> tuple[str, RunReport]:
    """Run a full session over a recorded/generated trace; returns the
    serialized event log and a run report. Deterministic: identical inputs
    give byte-identical logs."""
    engine = Engine(scene, mode, index=index)
    times = np.array([s.t for s in trace.samples], dtype=np.float64)
    for tick in range(_tick_count(trace, engine.cfg.tick)):
        engine.step(pose_at_tick(trace, times, tick, engine.cfg.tick))
    return engine.log_text(), engine.report()


# --- closed-loop agents ------------------------------------------------------

class CueChaser:
    """Follows the system cue whenever one is shown; otherwise rests the gaze
    off any collider. Completes a guided tour on its own.

    All aim poses are fixed per roi, so they are built once up front."""

    def __init__(self, scene: Scene, index: Optional[MeshIndex] = None):
        index = index or MeshIndex(scene.mesh)
        self._aim_pose: dict[int, Pose6DoF] = {}
        for roi in scene.script.roi_units:
            eye = approach_eye(scene, index, roi)
            target = scene.roi_centroid(roi)
            self._aim_pose[roi] = Pose6DoF(eye, look_at_quaternion(normalized(target - eye)))
        bounds_min, bounds_max = scene.mesh.bounds()
        mid = (bounds_min + bounds_max) * 0.5
        rest_eye = np.array([0.0, mid[1], bounds_max[2] + STANDOFF])
        rest_target = np.array([0.0, bounds_max[1] + 1.0, 0.0])  # above the statue
        self._rest_pose = Pose6DoF(
            rest_eye, look_at_quaternion(normalized(rest_target - rest_eye))
        )

    def pose(self, tick: int, engine: Engine) -> Pose6DoF:
        if engine.cue is not None:
            return self._aim_pose[engine.cue]
        return self._rest_pose


class FixedChoiceAgent(CueChaser):
    """Chases cues like CueChaser, but during user turns dwells on one fixed
    roi (a repeat-selector for mixed-mode tests)."""

    def __init__(self, scene: Scene, favourite: int, index: Optional[MeshIndex] = None):
        super().__init__(scene, index)
        self.favourite = favourite

    def pose(self, tick: int, engine: Engine) -> Pose6DoF:
        if engine.cue is not None:
            return self._aim_pose[engine.cue]
        if self.favourite in engine.enabled:
            return self._aim_pose[self.favourite]
        return self._rest_pose


class RandomGazeAgent(CueChaser):
    """Seeded random behaviour: re-targets periodically to a random roi
    (sometimes the cue, sometimes off-mesh); useful for contract fuzzing."""

    def __init__(self, scene: Scene, seed: int, index: Optional[MeshIndex] = None,
                 retarget_ticks: int = 30, chase_bias: float = 0.5, roi_bias: float = 0.85):
        super().__init__(scene, index)
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.retarget_ticks = retarget_ticks
        self.chase_bias = chase_bias
        self.roi_bias = roi_bias
        self.rois = sorted(scene.script.roi_units)
        self._current: Optional[int] = None  # roi or None for rest

    def pose(self, tick: int, engine: Engine) -> Pose6DoF:
        if tick % self.retarget_ticks == 0:
            r = self.rng.random()
            if engine.cue is not None and r < self.chase_bias:
                self._current = engine.cue
            elif r < self.roi_bias:
                self._current = self.rois[int(self.rng.integers(len(self.rois)))]
            else:
                self._current = None
        if self._current is None:
            return self._rest_pose
        return self._aim_pose[self._current]


def run_with_agent(
    scene: Scene,
    mode: str,
    agent,
    max_ticks: int,
    index: Optional[MeshIndex] = None,
    stop_when_complete: bool = True,
) -> tuple[Engine, GazeTrace]:
    """Closed-loop run: the agent sees the engine's directives each tick and
    answers with a pose. Also records the trace, so the run can be replayed
    through run_headless and must reproduce the same log byte for byte."""
    engine = Engine(scene, mode, index=index)
    dt = engine.cfg.tick
    samples = []
    for tick in range(max_ticks):
        pose = agent.pose(tick, engine)
        samples.append(GazeSample(tick * dt, pose))
        engine.step(pose)
        if stop_when_complete and engine.completed:
            break
    return engine, GazeTrace(tuple(samples))
