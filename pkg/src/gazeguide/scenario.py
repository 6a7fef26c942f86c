"""Scenario files: schema, parsing, validation, and the bundled statue demo.

A `*.scenario.json` bundles everything a session needs: a mesh reference,
optional virtual meshes merged into it, one collider per roi, the nine-unit
session script, selection timing, and an optional timeline dataset. The
serializer is canonical (fixed key order, ascii, sorted where unordered), so
serialize(parse(x)) is byte-stable.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .geometry import (
    ColliderSpec,
    MeshTransform,
    Pose6DoF,
    SOURCE_VIRTUAL,
    SphereVolume,
    TriangleMesh,
    dump_mesh,
    load_mesh,
    merge_virtual,
)
from .interaction import SelectionConfig
from .mediation import ContentUnit, SessionScript

SCHEMA_VERSION = 1


class SchemaViolation(ValueError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class DanglingReference(ValueError):
    def __init__(self, name: str):
        super().__init__(f"dangling reference: {name}")
        self.name = name


@dataclass(frozen=True)
class VirtualMeshRef:
    mesh_ref: str
    transform: MeshTransform
    unit_id: Optional[str] = None


@dataclass(frozen=True)
class TimelineEntry:
    year: int
    image_ref: str
    caption: str


@dataclass(frozen=True)
class TimelineRow:
    name: str
    entries: tuple[TimelineEntry, ...]


@dataclass(frozen=True)
class Timeline:
    rows: tuple[TimelineRow, ...]

    def __post_init__(self):
        if len(self.rows) != 3:
            raise SchemaViolation("timeline.rows", f"expected 3 rows, got {len(self.rows)}")


@dataclass(frozen=True)
class ScenarioFile:
    scenario_id: str
    mesh_ref: str
    colliders: tuple[ColliderSpec, ...]
    script: SessionScript
    units: tuple[ContentUnit, ...]
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    virtual_meshes: tuple[VirtualMeshRef, ...] = ()
    timeline: Optional[Timeline] = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        object.__setattr__(self, "colliders", tuple(self.colliders))
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "virtual_meshes", tuple(self.virtual_meshes))
        _check_cross_references(self)

    def unit(self, unit_id: str) -> ContentUnit:
        for u in self.units:
            if u.unit_id == unit_id:
                return u
        raise KeyError(unit_id)

    def collider(self, roi_id: int) -> ColliderSpec:
        for c in self.colliders:
            if c.roi_id == roi_id:
                return c
        raise KeyError(roi_id)


def _check_cross_references(s: ScenarioFile) -> None:
    roi_ids = [c.roi_id for c in s.colliders]
    if len(set(roi_ids)) != len(roi_ids):
        raise SchemaViolation("colliders", "duplicate roi_id")
    unit_ids = [u.unit_id for u in s.units]
    if len(set(unit_ids)) != len(unit_ids):
        raise SchemaViolation("units", "duplicate unit_id")
    known_units = set(unit_ids)
    known_rois = set(roi_ids)

    script_rois = set(s.script.roi_units)
    if script_rois != known_rois:
        missing = script_rois - known_rois
        if missing:
            raise DanglingReference(f"script roi {sorted(missing)[0]}")
        raise SchemaViolation("script.roi_units", "collider count must equal roi count")
    for name in (s.script.intro, s.script.conclusion, *s.script.roi_units.values()):
        if name not in known_units:
            raise DanglingReference(f"unit {name}")

    intro_conclusion = {s.script.intro, s.script.conclusion}
    for i, u in enumerate(s.units):
        if u.unit_id in intro_conclusion:
            if u.linked_roi is not None:
                raise SchemaViolation(f"units[{i}].linked_roi", "intro/conclusion carry no roi")
            continue
        roi = s.script.roi_of_unit(u.unit_id)
        if roi is None:
            raise SchemaViolation(f"units[{i}]", f"unit {u.unit_id} is not referenced by the script")
        if u.linked_roi is None or u.linked_roi != roi:
            if u.linked_roi is not None and u.linked_roi not in known_rois:
                raise DanglingReference(f"roi {u.linked_roi}")
            raise SchemaViolation(
                f"units[{i}].linked_roi", f"must equal the roi linking it ({roi})"
            )
        if u.is_core != (roi in s.script.core_set):
            raise SchemaViolation(f"units[{i}].is_core", "must match the script core_set")
    for i, v in enumerate(s.virtual_meshes):
        if v.unit_id is not None and v.unit_id not in known_units:
            raise DanglingReference(f"unit {v.unit_id}")


# --- JSON round trip ------------------------------------------------------

def _f3(values) -> list[float]:
    return [float(v) for v in values]


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaViolation(path, f"missing key {key!r}")
    return obj[key]


def parse_scenario(data: bytes | str) -> ScenarioFile:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaViolation("$", "document must be an object")
    version = _require(doc, "schema_version", "$")
    if version != SCHEMA_VERSION:
        raise SchemaViolation("schema_version", f"unsupported version {version!r}")

    try:
        colliders = []
        for i, c in enumerate(doc.get("colliders", [])):
            volumes = tuple(
                SphereVolume(np.array(_f3(v["center"])), float(v["radius"]))
                for v in _require(c, "volumes", f"colliders[{i}]")
            )
            colliders.append(
                ColliderSpec(
                    roi_id=int(_require(c, "roi_id", f"colliders[{i}]")),
                    volumes=volumes,
                    highlight_triangles=frozenset(int(t) for t in c.get("highlight_triangles", [])),
                    label=str(c.get("label", "")),
                )
            )

        units = []
        for i, u in enumerate(doc.get("units", [])):
            units.append(
                ContentUnit(
                    unit_id=str(_require(u, "unit_id", f"units[{i}]")),
                    kind=str(_require(u, "kind", f"units[{i}]")),
                    duration=float(_require(u, "duration", f"units[{i}]")),
                    transcript=str(u.get("transcript", "")),
                    asset_refs=tuple(str(a) for a in u.get("asset_refs", [])),
                    linked_roi=None if u.get("linked_roi") is None else int(u["linked_roi"]),
                    is_core=bool(u.get("is_core", False)),
                )
            )

        sdoc = _require(doc, "script", "$")
        script = SessionScript(
            intro=str(_require(sdoc, "intro", "script")),
            conclusion=str(_require(sdoc, "conclusion", "script")),
            roi_units={int(k): str(v) for k, v in _require(sdoc, "roi_units", "script").items()},
            guided_order=tuple(int(r) for r in _require(sdoc, "guided_order", "script")),
            core_set=frozenset(int(r) for r in _require(sdoc, "core_set", "script")),
        )

        sel = doc.get("selection", {})
        selection = SelectionConfig(
            hover_duration=float(sel.get("hover_duration", 2.0)),
            dwell_duration=float(sel.get("dwell_duration", 2.0)),
            exit_grace=float(sel.get("exit_grace", 0.3)),
            tick=float(sel.get("tick", 1.0 / 60.0)),
        )

        virtual = []
        for i, v in enumerate(doc.get("virtual_meshes", [])):
            t = _require(v, "transform", f"virtual_meshes[{i}]")
            transform = MeshTransform(
                Pose6DoF(
                    np.array(_f3(_require(t, "position", "transform"))),
                    np.array([float(q) for q in _require(t, "orientation", "transform")]),
                ),
                float(t.get("scale", 1.0)),
            )
            virtual.append(
                VirtualMeshRef(
                    mesh_ref=str(_require(v, "mesh_ref", f"virtual_meshes[{i}]")),
                    transform=transform,
                    unit_id=None if v.get("unit_id") is None else str(v["unit_id"]),
                )
            )

        timeline = None
        if doc.get("timeline") is not None:
            rows = tuple(
                TimelineRow(
                    name=str(_require(r, "name", f"timeline.rows[{i}]")),
                    entries=tuple(
                        TimelineEntry(int(e["year"]), str(e["image_ref"]), str(e["caption"]))
                        for e in r.get("entries", [])
                    ),
                )
                for i, r in enumerate(doc["timeline"].get("rows", []))
            )
            timeline = Timeline(rows)

        return ScenarioFile(
            scenario_id=str(doc.get("scenario_id", "scenario")),
            mesh_ref=str(_require(doc, "mesh_ref", "$")),
            colliders=tuple(colliders),
            script=script,
            units=tuple(units),
            selection=selection,
            virtual_meshes=tuple(virtual),
            timeline=timeline,
        )
    except (SchemaViolation, DanglingReference):
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation("$", str(exc)) from None


def serialize_scenario(s: ScenarioFile) -> str:
    doc: dict[str, Any] = {
        "schema_version": s.schema_version,
        "scenario_id": s.scenario_id,
        "mesh_ref": s.mesh_ref,
        "virtual_meshes": [
            {
                "mesh_ref": v.mesh_ref,
                "transform": {
                    "position": _f3(v.transform.pose.position),
                    "orientation": _f3(v.transform.pose.orientation),
                    "scale": v.transform.scale,
                },
                "unit_id": v.unit_id,
            }
            for v in s.virtual_meshes
        ],
        "colliders": [
            {
                "roi_id": c.roi_id,
                "label": c.label,
                "volumes": [
                    {"center": _f3(v.center), "radius": v.radius} for v in c.volumes
                ],
                "highlight_triangles": sorted(c.highlight_triangles),
            }
            for c in sorted(s.colliders, key=lambda c: c.roi_id)
        ],
        "script": {
            "intro": s.script.intro,
            "conclusion": s.script.conclusion,
            "roi_units": {str(k): v for k, v in sorted(s.script.roi_units.items())},
            "guided_order": list(s.script.guided_order),
            "core_set": sorted(s.script.core_set),
        },
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
    }
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


# --- validation findings --------------------------------------------------

@dataclass(frozen=True)
class Finding:
    kind: str  # unreachable_roi | highlight_outside_collider | overlap_warning
    message: str
    roi_id: Optional[int] = None


def _closest_distance_to_mesh(point: np.ndarray, mesh: TriangleMesh) -> float:
    """Exact minimum distance from a point to the mesh surface (vectorized
    point-triangle closest point, Ericson's region tests)."""
    a = mesh.vertices[mesh.triangles[:, 0]]
    b = mesh.vertices[mesh.triangles[:, 1]]
    c = mesh.vertices[mesh.triangles[:, 2]]
    p = point[None, :]
    ab = b - a
    ac = c - a
    ap = p - a

    def dot(x, y):
        return np.sum(x * y, axis=1)

    d1 = dot(ab, ap)
    d2 = dot(ac, ap)
    bp = p - b
    d3 = dot(ab, bp)
    d4 = dot(ac, bp)
    cp = p - c
    d5 = dot(ab, cp)
    d6 = dot(ac, cp)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    with np.errstate(divide="ignore", invalid="ignore"):
        v_ab = np.nan_to_num(d1 / (d1 - d3))
        w_ac = np.nan_to_num(d2 / (d2 - d6))
        w_bc = np.nan_to_num((d4 - d3) / ((d4 - d3) + (d5 - d6)))
        denom = va + vb + vc
        v_in = np.nan_to_num(vb / denom)
        w_in = np.nan_to_num(vc / denom)

    closest = a + ab * v_in[:, None] + ac * w_in[:, None]
    m = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
    closest[m] = b[m] + (c - b)[m] * w_bc[m][:, None]
    m = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    closest[m] = a[m] + ac[m] * w_ac[m][:, None]
    m = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    closest[m] = a[m] + ab[m] * v_ab[m][:, None]
    m = (d6 >= 0) & (d5 <= d6)
    closest[m] = c[m]
    m = (d3 >= 0) & (d4 <= d3)
    closest[m] = b[m]
    m = (d1 <= 0) & (d2 <= 0)
    closest[m] = a[m]

    d = closest - p
    return float(np.sqrt(np.min(np.sum(d * d, axis=1))))


def validate_scenario(s: ScenarioFile, mesh: TriangleMesh) -> list[Finding]:
    """Cross-check colliders against the (merged) scenario mesh.

    Returns findings, not failures: a collider sphere that never touches the
    surface (the roi cannot be gazed), highlight triangles lying outside their
    own collider volume, and collider pairs whose volumes overlap.
    """
    findings: list[Finding] = []
    for c in s.colliders:
        touches = any(
            _closest_distance_to_mesh(v.center, mesh) <= v.radius for v in c.volumes
        )
        if not touches:
            findings.append(
                Finding("unreachable_roi", f"roi {c.roi_id}: no collider sphere touches the surface", c.roi_id)
            )
        for tri_id in sorted(c.highlight_triangles):
            if tri_id < 0 or tri_id >= mesh.triangle_count:
                findings.append(
                    Finding(
                        "highlight_outside_collider",
                        f"roi {c.roi_id}: highlight triangle {tri_id} is not in the mesh",
                        c.roi_id,
                    )
                )
                continue
            centroid = mesh.triangle_vertices(tri_id).mean(axis=0)
            if not c.contains(centroid):
                findings.append(
                    Finding(
                        "highlight_outside_collider",
                        f"roi {c.roi_id}: highlight triangle {tri_id} lies outside the collider",
                        c.roi_id,
                    )
                )
    ordered = sorted(s.colliders, key=lambda c: c.roi_id)
    for i, c1 in enumerate(ordered):
        for c2 in ordered[i + 1 :]:
            for v1 in c1.volumes:
                for v2 in c2.volumes:
                    gap = float(np.linalg.norm(v1.center - v2.center))
                    if gap < v1.radius + v2.radius:
                        findings.append(
                            Finding(
                                "overlap_warning",
                                f"colliders {c1.roi_id} and {c2.roi_id} overlap",
                                c1.roi_id,
                            )
                        )
                        break
                else:
                    continue
                break
    return findings


# --- loading a playable scene --------------------------------------------

@dataclass(frozen=True)
class Scene:
    """A scenario resolved against its meshes: the merged world the engine runs on."""

    scenario: ScenarioFile
    mesh: TriangleMesh

    @property
    def colliders(self) -> tuple[ColliderSpec, ...]:
        return self.scenario.colliders

    @property
    def script(self) -> SessionScript:
        return self.scenario.script

    @property
    def selection(self) -> SelectionConfig:
        return self.scenario.selection

    def unit_duration_ticks(self, unit_id: str) -> int:
        return self.scenario.selection.ticks_for(self.scenario.unit(unit_id).duration)

    def units_by_roi(self) -> dict[int, tuple[str, int]]:
        return {
            roi: (unit_id, self.unit_duration_ticks(unit_id))
            for roi, unit_id in self.script.roi_units.items()
        }

    def roi_centroid(self, roi_id: int) -> np.ndarray:
        return self.scenario.collider(roi_id).centroid()


def load_scene(path: str | Path) -> Scene:
    """Read a scenario file, load its meshes, and merge the virtual ones."""
    path = Path(path)
    scenario = parse_scenario(path.read_bytes())
    base = path.parent
    mesh_path = base / scenario.mesh_ref
    if not mesh_path.is_file():
        raise DanglingReference(f"mesh file {scenario.mesh_ref}")
    mesh = load_mesh(mesh_path.read_bytes())
    for v in scenario.virtual_meshes:
        vpath = base / v.mesh_ref
        if not vpath.is_file():
            raise DanglingReference(f"mesh file {v.mesh_ref}")
        mesh = merge_virtual(mesh, load_mesh(vpath.read_bytes()), v.transform)
    return Scene(scenario, mesh)


# --- bundled demo ---------------------------------------------------------

def _box(vmin, vmax) -> tuple[list, list]:
    x0, y0, z0 = vmin
    x1, y1, z1 = vmax
    v = [
        (x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
        (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1),
    ]
    f = [
        (0, 2, 1), (0, 3, 2),  # back  z0
        (4, 5, 6), (4, 6, 7),  # front z1
        (0, 1, 5), (0, 5, 4),  # bottom
        (3, 6, 2), (3, 7, 6),  # top
        (0, 4, 7), (0, 7, 3),  # left
        (1, 2, 6), (1, 6, 5),  # right
    ]
    return v, f


def _cylinder(p0, p1, r0, r1, segments=16) -> tuple[list, list]:
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    axis = p1 - p0
    axis = axis / np.linalg.norm(axis)
    ref = np.array([0.0, 1.0, 0.0]) if abs(axis[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(ref, axis)
    u = u / np.linalg.norm(u)
    w = np.cross(axis, u)
    verts: list = []
    for center, r in ((p0, r0), (p1, r1)):
        for k in range(segments):
            ang = 2.0 * math.pi * k / segments
            verts.append(tuple(center + u * (r * math.cos(ang)) + w * (r * math.sin(ang))))
    verts.append(tuple(p0))
    verts.append(tuple(p1))
    faces = []
    for k in range(segments):
        k2 = (k + 1) % segments
        a, b = k, k2
        c, d = segments + k, segments + k2
        faces.append((a, b, c))
        faces.append((b, d, c))
        faces.append((2 * segments, b, a))  # bottom cap
        faces.append((2 * segments + 1, c, d))  # top cap
    return verts, faces


def _uv_sphere(center, r, rings=10, segments=16) -> tuple[list, list]:
    cx, cy, cz = center
    verts: list = []
    for i in range(1, rings):
        phi = math.pi * i / rings
        for k in range(segments):
            theta = 2.0 * math.pi * k / segments
            verts.append(
                (
                    cx + r * math.sin(phi) * math.cos(theta),
                    cy + r * math.cos(phi),
                    cz + r * math.sin(phi) * math.sin(theta),
                )
            )
    top = len(verts)
    verts.append((cx, cy + r, cz))
    bottom = len(verts)
    verts.append((cx, cy - r, cz))
    faces = []
    for k in range(segments):
        k2 = (k + 1) % segments
        faces.append((top, k2, k))
        faces.append((bottom, (rings - 2) * segments + k, (rings - 2) * segments + k2))
    for i in range(rings - 2):
        row0 = i * segments
        row1 = (i + 1) * segments
        for k in range(segments):
            k2 = (k + 1) % segments
            faces.append((row0 + k, row0 + k2, row1 + k))
            faces.append((row0 + k2, row1 + k2, row1 + k))
    return verts, faces


def _compose(*parts: tuple[list, list]) -> TriangleMesh:
    verts: list = []
    faces: list = []
    for v, f in parts:
        offset = len(verts)
        verts.extend(v)
        faces.extend((a + offset, b + offset, c + offset) for a, b, c in f)
    return TriangleMesh(
        np.array(verts, dtype=np.float64),
        np.array(faces, dtype=np.int64),
        np.zeros(len(faces), dtype=np.uint8),
    )


def demo_statue_mesh() -> TriangleMesh:
    """Placeholder statue, 3.90 m tall: pedestal, tapered body, head, two wing
    slabs at the back, a thin held branch, a garment-fold ridge, and an
    inscription plaque on the lower right front of the base."""
    return _compose(
        _box((-0.65, 0.0, -0.65), (0.65, 0.7, 0.65)),                    # pedestal
        _cylinder((0.0, 0.7, 0.0), (0.0, 3.1, 0.0), 0.42, 0.28, 24),     # body
        _uv_sphere((0.0, 3.32, 0.0), 0.22, 10, 16),                      # head
        _box((0.12, 1.7, -0.62), (0.95, 3.90, -0.30)),                   # left wing
        _box((-0.95, 1.7, -0.62), (-0.12, 3.90, -0.30)),                 # right wing
        _cylinder((0.45, 1.9, 0.25), (0.62, 3.25, 0.18), 0.045, 0.045, 10),  # palm branch
        _box((-0.25, 0.9, -0.48), (0.25, 1.6, -0.34)),                   # garment fold
        _box((0.25, 0.18, 0.65), (0.55, 0.42, 0.68)),                    # inscription plaque
    )


def demo_arm_mesh() -> TriangleMesh:
    """Reconstructed raised arm with a wreath stand-in, in its own object
    space (origin at the shoulder joint, reaching up and outward)."""
    return _compose(
        _cylinder((0.0, 0.0, 0.0), (-0.10, 0.62, 0.08), 0.05, 0.05, 10),
        _uv_sphere((-0.14, 0.72, 0.10), 0.11, 8, 12),
    )


DEMO_ARM_TRANSFORM = MeshTransform(
    Pose6DoF(np.array([-0.27, 3.0, 0.05]), np.array([1.0, 0.0, 0.0, 0.0])), 1.0
)

_DEMO_ROIS = [
    (1, "missing arm (laurel wreath)", (-0.41, 3.72, 0.15), 0.20),
    (2, "palm branch", (0.55, 2.60, 0.21), 0.25),
    (3, "front of the wings", (0.55, 3.30, -0.30), 0.25),
    (4, "head", (0.0, 3.30, 0.10), 0.20),
    (5, "back of the wings", (-0.55, 2.30, -0.62), 0.28),
    (6, "inscription on the base", (0.40, 0.30, 0.66), 0.20),
    (7, "garment fold", (0.0, 1.25, -0.43), 0.25),
]

_DEMO_TRANSCRIPTS = {
    "intro": "Welcome. Walk slowly around the figure and let your eyes travel across "
    "its surfaces; wherever a soft glow appears, a closer look is rewarded.",
    "arm-wreath": "The raised right arm is shown as a reconstruction. The original arm "
    "once held a wreath overhead; the flat mounting socket at the shoulder is still visible.",
    "palm-branch": "A long branch rests in the crook of the left arm. Compare its shape "
    "with the depictions shown beside it.",
    "wings-front": "Seen from the front, the wings frame the figure. Their smooth finish "
    "contrasts with the rougher surfaces behind.",
    "head": "Look at the head and face. The panel beside it shows how the figure was "
    "assembled and how heavy each part is.",
    "wings-back": "From behind, tool marks cross the back of the wings, a trace of how "
    "the surface was worked.",
    "inscription-timeline": "Near the lower right of the base an inscription records a name "
    "and the year 1885. It anchors the timeline unrolling behind the figure.",
    "garment": "Follow the deep folds of the garment around the back of the figure; "
    "circle the statue once to see how the fabric implies movement.",
    "conclusion": "To finish, the room changes: the floor drops away and the figure "
    "appears raised in a reconstructed hall, as it once stood.",
}

_DEMO_UNITS = [
    ("intro", "audio", 6.0, None),
    ("arm-wreath", "augmentation", 5.0, 1),
    ("palm-branch", "image_set", 5.0, 2),
    ("wings-front", "audio", 4.0, 3),
    ("head", "image_set", 5.0, 4),
    ("wings-back", "audio", 4.0, 5),
    ("inscription-timeline", "timeline", 6.0, 6),
    ("garment", "audio", 4.0, 7),
    ("conclusion", "reconstruction", 6.0, None),
]

DEMO_CORE_SET = frozenset({1, 2, 4, 6})


def _demo_timeline() -> Timeline:
    def row(name, entries):
        return TimelineRow(name, tuple(TimelineEntry(y, img, cap) for y, img, cap in entries))

    return Timeline(
        (
            row(
                "Prussian Classicism",
                [
                    (1885, "images/timeline/classicism-1885", "Completion year inscribed on the base"),
                    (1840, "images/timeline/classicism-1840", "Placeholder: earlier winged figure"),
                    (1871, "images/timeline/classicism-1871", "Placeholder: victory column figure"),
                ],
            ),
            row(
                "Roman antiquity",
                [
                    (1863, "images/timeline/roman-1863", "Placeholder: Roman statue, excavated 1863"),
                    (1820, "images/timeline/roman-1820", "Placeholder: Roman relief, found 1820"),
                ],
            ),
            row(
                "Greek antiquity",
                [
                    (1863, "images/timeline/greek-1863", "Placeholder: Greek statue, found 1863"),
                    (1799, "images/timeline/greek-1799", "Placeholder: Greek figurine, found 1799"),
                ],
            ),
        )
    )


def _demo_highlights(mesh: TriangleMesh, colliders: list[ColliderSpec]) -> list[ColliderSpec]:
    """Assign each collider the mesh triangles whose centroid it contains."""
    centroids = (
        mesh.vertices[mesh.triangles[:, 0]]
        + mesh.vertices[mesh.triangles[:, 1]]
        + mesh.vertices[mesh.triangles[:, 2]]
    ) / 3.0
    out = []
    for c in colliders:
        inside: set[int] = set()
        for v in c.volumes:
            d = centroids - v.center
            hit = np.nonzero(np.sum(d * d, axis=1) <= v.radius * v.radius)[0]
            inside.update(int(i) for i in hit)
        out.append(
            ColliderSpec(c.roi_id, c.volumes, frozenset(inside), c.label)
        )
    return out


def make_viktoria_demo() -> tuple[TriangleMesh, ScenarioFile]:
    """The bundled demo: placeholder statue plus a full nine-unit scenario.

    Returns the merged mesh (virtual arm included, tagged virtual) and the
    scenario file that references the same geometry via asset paths.
    """
    statue = demo_statue_mesh()
    merged = merge_virtual(statue, demo_arm_mesh(), DEMO_ARM_TRANSFORM)

    colliders = [
        ColliderSpec(roi, (SphereVolume(np.array(center), radius),), frozenset(), label)
        for roi, label, center, radius in _DEMO_ROIS
    ]
    colliders = _demo_highlights(merged, colliders)

    units = tuple(
        ContentUnit(
            unit_id=uid,
            kind=kind,
            duration=duration,
            transcript=_DEMO_TRANSCRIPTS[uid],
            asset_refs=(f"images/{uid}",) if kind in ("image_set", "timeline") else (),
            linked_roi=roi,
            is_core=roi is not None and roi in DEMO_CORE_SET,
        )
        for uid, kind, duration, roi in _DEMO_UNITS
    )
    script = SessionScript(
        intro="intro",
        conclusion="conclusion",
        roi_units={roi: uid for uid, _, _, roi in _DEMO_UNITS if roi is not None},
        guided_order=(1, 2, 3, 4, 5, 6, 7),
        core_set=DEMO_CORE_SET,
    )
    scenario = ScenarioFile(
        scenario_id="viktoria",
        mesh_ref="viktoria.obj",
        colliders=tuple(colliders),
        script=script,
        units=units,
        selection=SelectionConfig(),
        virtual_meshes=(VirtualMeshRef("viktoria_arm.obj", DEMO_ARM_TRANSFORM, "arm-wreath"),),
        timeline=_demo_timeline(),
    )
    return merged, scenario


def make_viktoria_scene() -> Scene:
    mesh, scenario = make_viktoria_demo()
    return Scene(scenario, mesh)


def write_demo_assets(out_dir: str | Path) -> list[Path]:
    """Write viktoria.obj, viktoria_arm.obj and viktoria.scenario.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _, scenario = make_viktoria_demo()
    paths = []
    p = out / "viktoria.obj"
    p.write_text(dump_mesh(demo_statue_mesh()), encoding="utf-8")
    paths.append(p)
    p = out / "viktoria_arm.obj"
    p.write_text(dump_mesh(demo_arm_mesh()), encoding="utf-8")
    paths.append(p)
    p = out / "viktoria.scenario.json"
    p.write_text(serialize_scenario(scenario), encoding="utf-8")
    paths.append(p)
    return paths
