"""Ray casting against triangle meshes: an exhaustive reference path and a
bounding-volume-hierarchy index that must agree with it bit for bit.

Both paths call the same scalar intersection kernel; the BVH only prunes
triangles whose bounding boxes the ray provably cannot reach at a distance
better than the current best, so the winning (distance, triangle_id) pair is
identical by construction. Intersections are reported for both triangle faces,
nearest first; exact distance ties go to the smaller triangle_id.
"""
from __future__ import annotations

import math
from typing import Optional

import numba
import numpy as np

from .geometry import SurfaceHit, TriangleMesh, as_direction, as_point

_LEAF_SIZE = 8
_STACK_DEPTH = 96


@numba.njit(cache=True, inline="always")
def _intersect_triangle(vertices, triangles, tri_id, ox, oy, oz, dx, dy, dz):
    """Moller-Trumbore, both faces. Returns (hit?, t, u, v)."""
    ia, ib, ic = triangles[tri_id, 0], triangles[tri_id, 1], triangles[tri_id, 2]
    ax, ay, az = vertices[ia, 0], vertices[ia, 1], vertices[ia, 2]
    e1x = vertices[ib, 0] - ax
    e1y = vertices[ib, 1] - ay
    e1z = vertices[ib, 2] - az
    e2x = vertices[ic, 0] - ax
    e2y = vertices[ic, 1] - ay
    e2z = vertices[ic, 2] - az
    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz
    if det == 0.0:
        return False, 0.0, 0.0, 0.0
    inv = 1.0 / det
    tx = ox - ax
    ty = oy - ay
    tz = oz - az
    u = (tx * px + ty * py + tz * pz) * inv
    if u < 0.0 or u > 1.0:
        return False, 0.0, 0.0, 0.0
    qx = ty * e1z - tz * e1y
    qy = tz * e1x - tx * e1z
    qz = tx * e1y - ty * e1x
    v = (dx * qx + dy * qy + dz * qz) * inv
    if v < 0.0 or u + v > 1.0:
        return False, 0.0, 0.0, 0.0
    t = (e2x * qx + e2y * qy + e2z * qz) * inv
    if t < 0.0:
        return False, 0.0, 0.0, 0.0
    return True, t, u, v


@numba.njit(cache=True)
def _cast_exhaustive(vertices, triangles, ox, oy, oz, dx, dy, dz):
    best_id = -1
    best_t = np.inf
    best_u = 0.0
    best_v = 0.0
    for tri_id in range(triangles.shape[0]):
        hit, t, u, v = _intersect_triangle(vertices, triangles, tri_id, ox, oy, oz, dx, dy, dz)
        if hit and (t < best_t or (t == best_t and tri_id < best_id)):
            best_id = tri_id
            best_t = t
            best_u = u
            best_v = v
    return best_id, best_t, best_u, best_v


@numba.njit(cache=True)
def _cast_bvh(
    vertices,
    triangles,
    node_min,
    node_max,
    node_left,
    node_right,
    node_first,
    node_count,
    tri_order,
    ox,
    oy,
    oz,
    dx,
    dy,
    dz,
):
    best_id = -1
    best_t = np.inf
    best_u = 0.0
    best_v = 0.0
    stack = np.empty(_STACK_DEPTH, dtype=np.int64)
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top]
        # conservative slab test against [0, best_t]
        tmin = 0.0
        tmax = best_t
        skip = False
        for axis in range(3):
            o = ox if axis == 0 else (oy if axis == 1 else oz)
            d = dx if axis == 0 else (dy if axis == 1 else dz)
            lo = node_min[node, axis]
            hi = node_max[node, axis]
            if d == 0.0:
                if o < lo or o > hi:
                    skip = True
                    break
            else:
                t1 = (lo - o) / d
                t2 = (hi - o) / d
                if t1 > t2:
                    t1, t2 = t2, t1
                if t1 > tmin:
                    tmin = t1
                if t2 < tmax:
                    tmax = t2
                if tmin > tmax:
                    skip = True
                    break
        if skip:
            continue
        count = node_count[node]
        if count > 0:
            first = node_first[node]
            for slot in range(first, first + count):
                tri_id = tri_order[slot]
                hit, t, u, v = _intersect_triangle(
                    vertices, triangles, tri_id, ox, oy, oz, dx, dy, dz
                )
                if hit and (t < best_t or (t == best_t and tri_id < best_id)):
                    best_id = tri_id
                    best_t = t
                    best_u = u
                    best_v = v
        else:
            stack[top] = node_left[node]
            top += 1
            stack[top] = node_right[node]
            top += 1
    return best_id, best_t, best_u, best_v


def _build_nodes(vertices: np.ndarray, triangles: np.ndarray, leaf_size: int):
    """Median-split BVH over triangle centroids; deterministic (stable sorts)."""
    m = len(triangles)
    tri_min = np.minimum.reduce(
        [vertices[triangles[:, 0]], vertices[triangles[:, 1]], vertices[triangles[:, 2]]]
    )
    tri_max = np.maximum.reduce(
        [vertices[triangles[:, 0]], vertices[triangles[:, 1]], vertices[triangles[:, 2]]]
    )
    centroids = (tri_min + tri_max) * 0.5

    order = np.arange(m, dtype=np.int64)
    node_min: list[np.ndarray] = []
    node_max: list[np.ndarray] = []
    node_left: list[int] = []
    node_right: list[int] = []
    node_first: list[int] = []
    node_count: list[int] = []

    def new_node(lo: int, hi: int) -> int:
        idx = order[lo:hi]
        node_min.append(tri_min[idx].min(axis=0))
        node_max.append(tri_max[idx].max(axis=0))
        node_left.append(-1)
        node_right.append(-1)
        node_first.append(lo)
        node_count.append(hi - lo)
        return len(node_min) - 1

    root = new_node(0, m)
    work = [(root, 0, m)]
    while work:
        node, lo, hi = work.pop()
        n = hi - lo
        if n <= leaf_size:
            continue
        idx = order[lo:hi]
        cmin = centroids[idx].min(axis=0)
        cmax = centroids[idx].max(axis=0)
        extent = cmax - cmin
        axis = int(np.argmax(extent))
        if extent[axis] <= 0.0:
            continue  # centroids coincide; keep as leaf
        keys = centroids[idx, axis]
        order[lo:hi] = idx[np.argsort(keys, kind="stable")]
        mid = lo + n // 2
        left = new_node(lo, mid)
        right = new_node(mid, hi)
        node_left[node] = left
        node_right[node] = right
        node_count[node] = 0
        work.append((left, lo, mid))
        work.append((right, mid, hi))

    return (
        np.ascontiguousarray(np.array(node_min, dtype=np.float64)),
        np.ascontiguousarray(np.array(node_max, dtype=np.float64)),
        np.array(node_left, dtype=np.int64),
        np.array(node_right, dtype=np.int64),
        np.array(node_first, dtype=np.int64),
        np.array(node_count, dtype=np.int64),
        order,
    )


def _make_hit(mesh: TriangleMesh, origin, direction, tri_id, t, u, v) -> SurfaceHit:
    tri = mesh.triangles[tri_id]
    a, b, c = mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]
    w = 1.0 - u - v
    point = np.array(
        [
            a[0] * w + b[0] * u + c[0] * v,
            a[1] * w + b[1] * u + c[1] * v,
            a[2] * w + b[2] * u + c[2] * v,
        ]
    )
    e1x, e1y, e1z = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    e2x, e2y, e2z = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    nx = e1y * e2z - e1z * e2y
    ny = e1z * e2x - e1x * e2z
    nz = e1x * e2y - e1y * e2x
    inv = 1.0 / math.sqrt(nx * nx + ny * ny + nz * nz)
    if nx * direction[0] + ny * direction[1] + nz * direction[2] > 0.0:
        inv = -inv  # face toward the viewer
    normal = np.array([nx * inv, ny * inv, nz * inv])
    return SurfaceHit(int(tri_id), point, np.array([w, u, v]), normal, float(t))


def ray_cast(mesh: TriangleMesh, origin, direction) -> Optional[SurfaceHit]:
    """Nearest intersection by exhaustive per-triangle testing (reference path)."""
    o = as_point(origin)
    d = as_direction(direction)
    tri_id, t, u, v = _cast_exhaustive(
        mesh.vertices, mesh.triangles, o[0], o[1], o[2], d[0], d[1], d[2]
    )
    if tri_id < 0:
        return None
    return _make_hit(mesh, o, d, tri_id, t, u, v)


class MeshIndex:
    """Immutable BVH over a mesh; safe to share across sessions and threads."""

    def __init__(self, mesh: TriangleMesh, leaf_size: int = _LEAF_SIZE):
        self.mesh = mesh
        (
            self._node_min,
            self._node_max,
            self._node_left,
            self._node_right,
            self._node_first,
            self._node_count,
            self._tri_order,
        ) = _build_nodes(mesh.vertices, mesh.triangles, leaf_size)

    @property
    def node_count(self) -> int:
        return len(self._node_min)

    def cast(self, origin, direction) -> Optional[SurfaceHit]:
        o = as_point(origin)
        d = as_direction(direction)
        tri_id, t, u, v = _cast_bvh(
            self.mesh.vertices,
            self.mesh.triangles,
            self._node_min,
            self._node_max,
            self._node_left,
            self._node_right,
            self._node_first,
            self._node_count,
            self._tri_order,
            o[0],
            o[1],
            o[2],
            d[0],
            d[1],
            d[2],
        )
        if tri_id < 0:
            return None
        return _make_hit(self.mesh, o, d, tri_id, t, u, v)
