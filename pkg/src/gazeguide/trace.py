"""Gaze traces and their offline analysis: fixation detection on surface hit
points, per-roi viewing statistics, and deriving candidate roi colliders from
where people actually looked.

Traces are JSON lines (`*.trace.jsonl`): a header line, then one sample per
line. Floats serialize via Python's shortest round-trip repr, so a parsed
trace re-serializes byte-identically.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .events import LOG_VERSION, MalformedRecord, VersionMismatch
from .geometry import ColliderSet, ColliderSpec, Pose6DoF, SphereVolume, TriangleMesh
from .raycast import MeshIndex


@dataclass(frozen=True)
class GazeSample:
    t: float
    pose: Pose6DoF


@dataclass(frozen=True)
class GazeTrace:
    """Time-ordered 6-DoF head poses (t strictly increasing)."""

    samples: tuple[GazeSample, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sample timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        if len(self.samples) < 2:
            return 0.0
        return self.samples[-1].t - self.samples[0].t


def serialize_trace(trace: GazeTrace) -> str:
    header = json.dumps({"version": LOG_VERSION, "kind": "trace"}, separators=(",", ":"))
    lines = [header]
    for s in trace.samples:
        lines.append(
            json.dumps(
                {
                    "t": s.t,
                    "pos": [float(v) for v in s.pose.position],
                    "quat": [float(v) for v in s.pose.orientation],
                },
                separators=(",", ":"),
            )
        )
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> GazeTrace:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedRecord(1, "empty trace")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise MalformedRecord(1, f"bad header: {exc}") from None
    if not isinstance(header, dict) or header.get("kind") != "trace":
        raise MalformedRecord(1, "header is not a trace header")
    if header.get("version") != LOG_VERSION:
        raise VersionMismatch(header.get("version"))
    samples = []
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
            samples.append(
                GazeSample(
                    float(obj["t"]),
                    Pose6DoF(np.array(obj["pos"], dtype=np.float64),
                             np.array(obj["quat"], dtype=np.float64)),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise MalformedRecord(line_no, str(exc)) from None
    try:
        return GazeTrace(tuple(samples))
    except ValueError as exc:
        raise MalformedRecord(0, str(exc)) from None


# --- fixation detection ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class Fixation:
    start: float
    end: float
    centroid: np.ndarray
    sample_count: int

    def __eq__(self, other):
        return (
            isinstance(other, Fixation)
            and (self.start, self.end, self.sample_count)
            == (other.start, other.end, other.sample_count)
            and np.array_equal(self.centroid, other.centroid)
        )

    @property
    def duration(self) -> float:
        return self.end - self.start


def _window_ok(points: np.ndarray, radius: float) -> bool:
    centroid = points.mean(axis=0)
    d = points - centroid
    return bool(np.all(np.sum(d * d, axis=1) <= radius * radius))


def fixation_detect(
    times: Sequence[float],
    points: np.ndarray,
    dispersion_radius: float,
    min_duration: float,
) -> list[Fixation]:
    """Dispersion-threshold fixation detection on 3-D surface hit points.

    A window of consecutive samples is a fixation candidate while every member
    lies within `dispersion_radius` of the window centroid; windows grow from
    the left and stop at the first sample that breaks the criterion. Windows
    spanning at least `min_duration` become fixations (greedy, left to right,
    non-overlapping); otherwise the start advances by one sample.
    """
    if dispersion_radius <= 0 or min_duration <= 0:
        raise ValueError("dispersion_radius and min_duration must be > 0")
    times = np.asarray(times, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n = len(times)
    if n != len(points):
        raise ValueError("times and points must have equal length")
    fixations: list[Fixation] = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and _window_ok(points[i : j + 2], dispersion_radius):
            j += 1
        if times[j] - times[i] >= min_duration:
            window = points[i : j + 1]
            fixations.append(
                Fixation(float(times[i]), float(times[j]), window.mean(axis=0), j - i + 1)
            )
            i = j + 1
        else:
            i += 1
    return fixations


# --- per-roi statistics -----------------------------------------------------

@dataclass
class RoiTotals:
    seconds: float = 0.0
    first_look: Optional[float] = None
    entries: int = 0


@dataclass
class RoiStats:
    per_roi: dict[int, RoiTotals]
    off_roi_seconds: float
    duration: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["roi_id", "seconds", "first_look", "entries"])
        for roi in sorted(self.per_roi):
            t = self.per_roi[roi]
            w.writerow([roi, f"{t.seconds:.6f}", "" if t.first_look is None else f"{t.first_look:.6f}", t.entries])
        w.writerow(["off_roi", f"{self.off_roi_seconds:.6f}", "", ""])
        w.writerow(["duration", f"{self.duration:.6f}", "", ""])
        return buf.getvalue()


def roi_stats(
    trace: GazeTrace,
    mesh: TriangleMesh,
    colliders: Sequence[ColliderSpec],
    index: Optional[MeshIndex] = None,
) -> RoiStats:
    """Cast every sample's gaze ray, attribute inter-sample gaps to the roi
    gazed at the earlier sample (sample-and-hold; the last sample adds no
    time). Misses and non-roi surface count as off-roi."""
    index = index or MeshIndex(mesh)
    lookup = ColliderSet(colliders)
    per_roi = {c.roi_id: RoiTotals() for c in colliders}
    off = 0.0
    prev_roi: Optional[int] = None
    samples = trace.samples
    for k, sample in enumerate(samples):
        origin, direction = sample.pose.ray()
        hit = index.cast(origin, direction)
        roi = lookup.lookup(hit.point) if hit is not None else None
        if roi is not None:
            totals = per_roi[roi]
            if totals.first_look is None:
                totals.first_look = sample.t
            if roi != prev_roi:
                totals.entries += 1
        gap = samples[k + 1].t - sample.t if k + 1 < len(samples) else 0.0
        if roi is None:
            off += gap
        else:
            per_roi[roi].seconds += gap
        prev_roi = roi
    return RoiStats(per_roi, off, trace.duration)


def surface_hit_points(
    trace: GazeTrace, mesh: TriangleMesh, index: Optional[MeshIndex] = None
) -> tuple[np.ndarray, np.ndarray]:
    """(times, points) of the samples whose gaze ray hits the surface."""
    index = index or MeshIndex(mesh)
    times = []
    points = []
    for sample in trace.samples:
        hit = index.cast(*sample.pose.ray())
        if hit is not None:
            times.append(sample.t)
            points.append(hit.point)
    if not times:
        return np.empty(0), np.empty((0, 3))
    return np.array(times), np.array(points)


# --- deriving rois from fixations -------------------------------------------

def derive_rois(
    fixations: Sequence[Fixation],
    cluster_radius: float,
    min_total_duration: float,
) -> list[ColliderSpec]:
    """Greedy duration-weighted ball clustering of fixation centroids.

    Repeatedly seeds a cluster at the unassigned fixation with the largest
    duration (earliest start breaks ties), gathers every unassigned fixation
    whose centroid lies within `cluster_radius` of the seed, and keeps the
    cluster if its summed duration reaches `min_total_duration`. Candidates
    get sequential roi ids from 1 in discovery order, one sphere each centered
    on the duration-weighted centroid.
    """
    if cluster_radius <= 0 or min_total_duration <= 0:
        raise ValueError("cluster_radius and min_total_duration must be > 0")
    remaining = sorted(range(len(fixations)), key=lambda i: (-fixations[i].duration, fixations[i].start))
    assigned = set()
    candidates = []
    for seed in remaining:
        if seed in assigned:
            continue
        seed_c = fixations[seed].centroid
        members = []
        for i in remaining:
            if i in assigned:
                continue
            d = fixations[i].centroid - seed_c
            if float(d @ d) <= cluster_radius * cluster_radius:
                members.append(i)
        assigned.update(members)
        total = sum(fixations[i].duration for i in members)
        if total < min_total_duration:
            continue
        weights = np.array([fixations[i].duration for i in members])
        centers = np.array([fixations[i].centroid for i in members])
        center = (centers * weights[:, None]).sum(axis=0) / weights.sum()
        candidates.append((center, total))
    return [
        ColliderSpec(i + 1, (SphereVolume(center, cluster_radius),), frozenset(), "derived")
        for i, (center, _) in enumerate(candidates)
    ]
