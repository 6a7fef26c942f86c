"""World-mesh geometry: OBJ loading, virtual-mesh merging, collider containment,
and the sliding-puck surface cursor.

Conventions: right-handed coordinates, +Y up, units are metres. A pose "looks"
along its rotated -Z axis. Quaternions are (w, x, y, z), unit length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

UNIT_TOL = 1e-9
MIN_TRIANGLE_AREA = 1e-12

# per-triangle provenance tags
SOURCE_PHYSICAL = 0
SOURCE_VIRTUAL = 1


class MeshError(ValueError):
    """Base class for mesh construction and parsing failures."""


class MalformedLine(MeshError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class IndexOutOfRange(MeshError):
    def __init__(self, line_no: int, index: int, vertex_count: int):
        super().__init__(
            f"line {line_no}: vertex index {index} out of range (mesh has {vertex_count} vertices)"
        )
        self.line_no = line_no
        self.index = index


class DegenerateTriangle(MeshError):
    def __init__(self, where: str, area: float):
        super().__init__(f"{where}: triangle area {area:.3e} below {MIN_TRIANGLE_AREA:.0e} m^2")
        self.where = where
        self.area = area


class ScaleNonPositive(ValueError):
    def __init__(self, scale: float):
        super().__init__(f"uniform scale must be > 0, got {scale}")


def as_point(value) -> np.ndarray:
    """Validate a 3-component finite point, returned as float64 array."""
    p = np.asarray(value, dtype=np.float64)
    if p.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {p.shape}")
    if not (math.isfinite(p[0]) and math.isfinite(p[1]) and math.isfinite(p[2])):
        raise ValueError(f"point has non-finite components: {p}")
    return p


def as_direction(value) -> np.ndarray:
    """Validate a unit direction (norm within 1e-9 of 1)."""
    d = as_point(value)
    n = math.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
    if abs(n - 1.0) > UNIT_TOL:
        raise ValueError(f"direction norm {n} not unit within {UNIT_TOL}")
    return d


def normalized(value) -> np.ndarray:
    v = as_point(value)
    n = float(np.sqrt(v @ v))
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return v / n


@dataclass(frozen=True, eq=False)
class Pose6DoF:
    """Head pose: position plus unit orientation quaternion (w, x, y, z)."""

    position: np.ndarray
    orientation: np.ndarray

    def __eq__(self, other):
        return (
            isinstance(other, Pose6DoF)
            and np.array_equal(self.position, other.position)
            and np.array_equal(self.orientation, other.orientation)
        )

    def __post_init__(self):
        object.__setattr__(self, "position", as_point(self.position))
        q = np.asarray(self.orientation, dtype=np.float64)
        if q.shape != (4,):
            raise ValueError(f"quaternion needs 4 components, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("quaternion has non-finite components")
        n = float(np.sqrt(q @ q))
        if abs(n - 1.0) > UNIT_TOL:
            raise ValueError(f"quaternion norm {n} not unit within {UNIT_TOL}")
        object.__setattr__(self, "orientation", q)

    def rotate(self, vectors: np.ndarray) -> np.ndarray:
        """Rotate one (3,) vector or a stack (N, 3) by the orientation."""
        w = self.orientation[0]
        u = self.orientation[1:]
        v = np.asarray(vectors, dtype=np.float64)
        t = 2.0 * np.cross(u, v)
        return v + w * t + np.cross(u, t)

    def forward(self) -> np.ndarray:
        """Gaze direction: the rotated -Z axis (cached; poses are immutable)."""
        cached = self.__dict__.get("_forward")
        if cached is None:
            w, ux, uy, uz = self.orientation
            # expansion of rotate((0, 0, -1)) in scalars
            tx, ty = -2.0 * uy, 2.0 * ux
            cached = np.array(
                [w * tx - uz * ty, w * ty + uz * tx, -1.0 + ux * ty - uy * tx]
            )
            object.__setattr__(self, "_forward", cached)
        return cached

    def ray(self) -> tuple[np.ndarray, np.ndarray]:
        return self.position, self.forward()


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_from_matrix(m: np.ndarray) -> np.ndarray:
    """Unit quaternion from a 3x3 rotation matrix (Shepperd's method)."""
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        )
    elif m[1, 1] > m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        )
    return q / float(np.sqrt(q @ q))


def look_at_quaternion(forward: np.ndarray, up_hint=(0.0, 1.0, 0.0)) -> np.ndarray:
    """Orientation whose -Z axis points along `forward` (world +Y kept upward)."""
    f = normalized(forward)
    z = -f
    up = np.asarray(up_hint, dtype=np.float64)
    x = np.cross(up, z)
    nx = float(np.sqrt(x @ x))
    if nx < 1e-12:
        # looking straight up or down; fall back to +X as the up hint
        up = np.array([1.0, 0.0, 0.0])
        x = np.cross(up, z)
        nx = float(np.sqrt(x @ x))
    x = x / nx
    y = np.cross(z, x)
    return quat_from_matrix(np.column_stack([x, y, z]))


def pose_looking_at(eye, target, up_hint=(0.0, 1.0, 0.0)) -> Pose6DoF:
    eye = as_point(eye)
    target = as_point(target)
    return Pose6DoF(eye, look_at_quaternion(target - eye, up_hint))


def _triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    cross = np.cross(b - a, c - a)
    return 0.5 * np.sqrt(np.sum(cross * cross, axis=1))


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Indexed triangle soup with a per-triangle physical/virtual tag.

    vertices: (N, 3) float64, triangles: (M, 3) int64 vertex indices,
    triangle_source: (M,) uint8 of SOURCE_PHYSICAL / SOURCE_VIRTUAL.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    triangle_source: np.ndarray

    def __eq__(self, other):
        return (
            isinstance(other, TriangleMesh)
            and np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.triangle_source, other.triangle_source)
        )

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        t = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        s = np.ascontiguousarray(np.asarray(self.triangle_source, dtype=np.uint8))
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError(f"vertices must be (N, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise MeshError(f"triangles must be (M, 3), got {t.shape}")
        if len(t) == 0:
            raise MeshError("mesh needs at least one triangle")
        if s.shape != (len(t),):
            raise MeshError("triangle_source must have one tag per triangle")
        if not np.all(np.isfinite(v)):
            raise MeshError("vertices contain non-finite values")
        if t.min(initial=0) < 0 or (len(v) and t.max(initial=-1) >= len(v)):
            raise MeshError("triangle index out of vertex range")
        areas = _triangle_areas(v, t)
        bad = np.nonzero(areas <= MIN_TRIANGLE_AREA)[0]
        if len(bad):
            raise DegenerateTriangle(f"triangle {int(bad[0])}", float(areas[bad[0]]))
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "triangle_source", s)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def triangle_vertices(self, triangle_id: int) -> np.ndarray:
        return self.vertices[self.triangles[triangle_id]]


@dataclass(frozen=True, eq=False)
class SurfaceHit:
    """Nearest ray-mesh intersection.

    `normal` is the geometric triangle normal oriented toward the ray origin.
    """

    triangle_id: int
    point: np.ndarray
    barycentric: np.ndarray
    normal: np.ndarray
    distance: float

    def __eq__(self, other):
        return (
            isinstance(other, SurfaceHit)
            and self.triangle_id == other.triangle_id
            and self.distance == other.distance
            and np.array_equal(self.point, other.point)
            and np.array_equal(self.barycentric, other.barycentric)
            and np.array_equal(self.normal, other.normal)
        )


def load_mesh(data: bytes | str, fmt: str = "obj_subset") -> TriangleMesh:
    """Parse the OBJ subset: `v x y z`, `f a b c` (1-based), `#` comments.

    Any other keyword, arity, or token aborts with MalformedLine carrying the
    1-based line number. Faces may reference vertices declared later in the
    file; indices are checked against the final vertex count.
    """
    if fmt != "obj_subset":
        raise ValueError(f"unsupported mesh format: {fmt}")
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedLine(0, f"not valid UTF-8: {exc}") from None
    else:
        text = data

    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    face_lines: list[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        key = parts[0]
        if key == "v":
            if len(parts) != 4:
                raise MalformedLine(line_no, f"vertex needs 3 coordinates, got {len(parts) - 1}")
            try:
                x, y, z = (float(p) for p in parts[1:])
            except ValueError:
                raise MalformedLine(line_no, f"non-numeric vertex coordinate in {parts[1:]}") from None
            if not all(math.isfinite(c) for c in (x, y, z)):
                raise MalformedLine(line_no, "non-finite vertex coordinate")
            vertices.append((x, y, z))
        elif key == "f":
            if len(parts) != 4:
                raise MalformedLine(line_no, f"face needs 3 vertex indices, got {len(parts) - 1}")
            idx = []
            for p in parts[1:]:
                if not p.isdigit():
                    raise MalformedLine(line_no, f"face index {p!r} is not a positive integer")
                idx.append(int(p))
            faces.append((idx[0], idx[1], idx[2]))
            face_lines.append(line_no)
        else:
            raise MalformedLine(line_no, f"unsupported keyword {key!r}")

    nv = len(vertices)
    for (a, b, c), line_no in zip(faces, face_lines):
        for i in (a, b, c):
            if i < 1 or i > nv:
                raise IndexOutOfRange(line_no, i, nv)

    if not faces:
        raise MalformedLine(0, "mesh has no faces")
    v = np.array(vertices, dtype=np.float64)
    t = np.array(faces, dtype=np.int64) - 1
    areas = _triangle_areas(v, t)
    bad = np.nonzero(areas <= MIN_TRIANGLE_AREA)[0]
    if len(bad):
        raise DegenerateTriangle(f"line {face_lines[int(bad[0])]}", float(areas[bad[0]]))
    return TriangleMesh(v, t, np.full(len(t), SOURCE_PHYSICAL, dtype=np.uint8))


def dump_mesh(mesh: TriangleMesh) -> str:
    """Serialize to the OBJ subset (tags are not persisted; loads as physical)."""
    lines = []
    for x, y, z in mesh.vertices:
        lines.append(f"v {float(x)!r} {float(y)!r} {float(z)!r}")
    for a, b, c in mesh.triangles:
        lines.append(f"f {int(a) + 1} {int(b) + 1} {int(c) + 1}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MeshTransform:
    """Rigid pose plus uniform scale, applied scale-then-rotate-then-translate."""

    pose: Pose6DoF
    scale: float = 1.0

    def __post_init__(self):
        if not (self.scale > 0.0):
            raise ScaleNonPositive(self.scale)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return self.pose.rotate(np.asarray(points, dtype=np.float64) * self.scale) + self.pose.position


IDENTITY_TRANSFORM = MeshTransform(
    Pose6DoF(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0])), 1.0
)


def merge_virtual(world: TriangleMesh, addition: TriangleMesh, transform: MeshTransform) -> TriangleMesh:
    """Append `addition` (transformed, tagged virtual) to `world`.

    The world's triangles are untouched; the puck and ray casting treat the
    merged block exactly like physical surface.
    """
    moved = transform.apply(addition.vertices)
    vertices = np.vstack([world.vertices, moved])
    triangles = np.vstack([world.triangles, addition.triangles + world.vertex_count])
    source = np.concatenate(
        [world.triangle_source, np.full(addition.triangle_count, SOURCE_VIRTUAL, dtype=np.uint8)]
    )
    return TriangleMesh(vertices, triangles, source)


@dataclass(frozen=True, eq=False)
class SphereVolume:
    center: np.ndarray
    radius: float

    def __eq__(self, other):
        return (
            isinstance(other, SphereVolume)
            and self.radius == other.radius
            and np.array_equal(self.center, other.center)
        )

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (self.radius > 0.0):
            raise ValueError(f"sphere radius must be > 0, got {self.radius}")

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3


@dataclass(frozen=True)
class ColliderSpec:
    """Selectable region: a union of spheres plus the triangle set highlighted
    when the region is cued or confirmed."""

    roi_id: int
    volumes: tuple[SphereVolume, ...]
    highlight_triangles: frozenset[int] = frozenset()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "volumes", tuple(self.volumes))
        object.__setattr__(self, "highlight_triangles", frozenset(self.highlight_triangles))
        if not self.volumes:
            raise ValueError(f"roi {self.roi_id}: collider needs at least one sphere")

    @property
    def total_volume(self) -> float:
        # overlap between a collider's own spheres is ignored by convention
        return sum(v.volume for v in self.volumes)

    def centroid(self) -> np.ndarray:
        """Volume-weighted center of the sphere union."""
        weights = np.array([v.volume for v in self.volumes])
        centers = np.array([v.center for v in self.volumes])
        return (centers * weights[:, None]).sum(axis=0) / weights.sum()

    def contains(self, point: np.ndarray) -> bool:
        p = np.asarray(point, dtype=np.float64)
        for v in self.volumes:
            d = p - v.center
            if float(d @ d) <= v.radius * v.radius:
                return True
        return False


class ColliderSet:
    """Collider spheres flattened and sorted by precedence for per-tick
    containment lookups.

    Overlap rule: the ROI with the smallest total volume wins, ties broken by
    the lowest roi_id; spheres are pre-sorted by that key, so the first
    containing sphere decides.
    """

    def __init__(self, colliders: Sequence[ColliderSpec]):
        self.colliders = list(colliders)
        if len({c.roi_id for c in self.colliders}) != len(self.colliders):
            raise ValueError("duplicate roi_id in collider list")
        spheres = []
        for spec in self.colliders:
            for vol in spec.volumes:
                c = vol.center
                spheres.append(
                    (
                        (spec.total_volume, spec.roi_id),
                        (float(c[0]), float(c[1]), float(c[2]),
                         vol.radius * vol.radius, spec.roi_id),
                    )
                )
        spheres.sort(key=lambda s: s[0])
        self._spheres = [s[1] for s in spheres]

    def lookup(self, point: np.ndarray) -> Optional[int]:
        x, y, z = float(point[0]), float(point[1]), float(point[2])
        for cx, cy, cz, r_sq, roi in self._spheres:
            dx = x - cx
            dy = y - cy
            dz = z - cz
            if dx * dx + dy * dy + dz * dz <= r_sq:
                return roi
        return None


def containment(hit: SurfaceHit, colliders: Sequence[ColliderSpec]) -> Optional[int]:
    """ROI whose collider volume contains the hit point, or None."""
    return ColliderSet(colliders).lookup(hit.point)


@dataclass(frozen=True, eq=False)
class PuckState:
    """Smoothed surface cursor. Display values hold the last surface contact
    while the gaze ray misses; before any contact they are None."""

    current_hit: Optional[SurfaceHit] = None
    display_point: Optional[np.ndarray] = None
    display_normal: Optional[np.ndarray] = None

    def __eq__(self, other):
        return (
            isinstance(other, PuckState)
            and self.current_hit == other.current_hit
            and np.array_equal(self.display_point, other.display_point)
            and np.array_equal(self.display_normal, other.display_normal)
        )


def puck_step(puck: PuckState, hit: Optional[SurfaceHit], dt: float, tau: float = 0.05) -> PuckState:
    """Advance the puck one tick: exponential pull toward the latest hit.

    The displayed point/normal move by factor 1 - exp(-dt/tau); tau == 0 snaps
    exactly. A missing hit leaves the display untouched (hold-last). Smoothing
    is cosmetic only; selection logic consumes raw hits.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if hit is None:
        return replace(puck, current_hit=None)
    if puck.display_point is None or tau <= 0.0:
        return PuckState(hit, hit.point.copy(), hit.normal.copy())
    alpha = 1.0 - math.exp(-dt / tau)
    point = puck.display_point + (hit.point - puck.display_point) * alpha
    normal = puck.display_normal + (hit.normal - puck.display_normal) * alpha
    n = float(np.sqrt(normal @ normal))
    normal = hit.normal.copy() if n < 1e-12 else normal / n
    return PuckState(hit, point, normal)
