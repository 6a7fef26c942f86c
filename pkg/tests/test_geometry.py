import math
from pathlib import Path

import numpy as np
import pytest

from gazeguide.geometry import (
    ColliderSpec,
    DegenerateTriangle,
    IndexOutOfRange,
    MalformedLine,
    MeshTransform,
    Pose6DoF,
    PuckState,
    ScaleNonPositive,
    SOURCE_PHYSICAL,
    SOURCE_VIRTUAL,
    SphereVolume,
    TriangleMesh,
    as_direction,
    containment,
    dump_mesh,
    load_mesh,
    merge_virtual,
    puck_step,
)
from gazeguide.raycast import ray_cast

ASSETS = Path(__file__).resolve().parents[1] / "src" / "gazeguide" / "assets"

SINGLE_TRIANGLE = """\
# one triangle
v -1.0 -1.0 0.0
v 1.0 -1.0 0.0
v 0.0 1.0 0.0
f 1 2 3
"""


def identity_pose(position=(0.0, 0.0, 0.0)):
    return Pose6DoF(np.array(position), np.array([1.0, 0.0, 0.0, 0.0]))


def brute_force_cast(mesh, origin, direction):
    """Independent oracle: plain-python Moller-Trumbore over every triangle."""
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    best = None
    for tri_id in range(mesh.triangle_count):
        a, b, c = (mesh.vertices[i] for i in mesh.triangles[tri_id])
        e1, e2 = b - a, c - a
        p = np.cross(direction, e2)
        det = float(e1 @ p)
        if det == 0.0:
            continue
        inv = 1.0 / det
        tvec = origin - a
        u = float(tvec @ p) * inv
        if u < 0.0 or u > 1.0:
            continue
        q = np.cross(tvec, e1)
        v = float(direction @ q) * inv
        if v < 0.0 or u + v > 1.0:
            continue
        t = float(e2 @ q) * inv
        if t < 0.0:
            continue
        if best is None or (t, tri_id) < best[:2]:
            best = (t, tri_id, u, v)
    return best


class TestLoadMesh:
    def test_single_triangle(self):
        mesh = load_mesh(SINGLE_TRIANGLE.encode())
        assert mesh.vertex_count == 3
        assert mesh.triangle_count == 1
        assert list(mesh.triangle_source) == [SOURCE_PHYSICAL]

    def test_index_out_of_range(self):
        bad = SINGLE_TRIANGLE.replace("f 1 2 3", "f 1 2 9")
        with pytest.raises(IndexOutOfRange) as err:
            load_mesh(bad)
        assert err.value.index == 9
        assert err.value.line_no == 5

    def test_malformed_lines(self):
        with pytest.raises(MalformedLine):
            load_mesh("v 1.0 2.0\nf 1 1 1\n")  # arity
        with pytest.raises(MalformedLine):
            load_mesh("vn 0 0 1\n")  # keyword outside the subset
        with pytest.raises(MalformedLine):
            load_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2 3/3\n")  # slash syntax
        with pytest.raises(MalformedLine) as err:
            load_mesh("v 0 0 zero\n")
        assert err.value.line_no == 1

    def test_degenerate_triangle(self):
        flat = "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n"
        with pytest.raises(DegenerateTriangle):
            load_mesh(flat)

    def test_bundled_statue_counts_match_text_scan(self):
        # oracle: an independent line scan over the same asset
        text = (ASSETS / "viktoria.obj").read_text()
        v_lines = sum(1 for line in text.splitlines() if line.startswith("v "))
        f_lines = sum(1 for line in text.splitlines() if line.startswith("f "))
        mesh = load_mesh(text)
        assert mesh.vertex_count == v_lines
        assert mesh.triangle_count == f_lines

    def test_dump_round_trip(self):
        mesh = load_mesh(SINGLE_TRIANGLE)
        again = load_mesh(dump_mesh(mesh))
        assert np.array_equal(mesh.vertices, again.vertices)
        assert np.array_equal(mesh.triangles, again.triangles)


class TestMergeVirtual:
    def test_identity_concat(self):
        mesh = load_mesh(SINGLE_TRIANGLE)
        other = load_mesh(SINGLE_TRIANGLE.replace("0.0", "2.0"))
        merged = merge_virtual(mesh, other, MeshTransform(identity_pose()))
        assert merged.triangle_count == mesh.triangle_count + other.triangle_count
        assert list(merged.triangle_source) == [SOURCE_PHYSICAL, SOURCE_VIRTUAL]
        assert np.array_equal(merged.vertices[:3], mesh.vertices)

    def test_merged_block_hit_is_tagged_virtual(self):
        # statue plus arm: a ray aimed at the arm must land on a virtual triangle,
        # verified against a brute-force cast over all triangles
        from gazeguide.scenario import make_viktoria_demo

        mesh, scenario = make_viktoria_demo()
        arm = scenario.collider(1)
        target = arm.centroid()
        origin = target + np.array([-2.0, 0.3, 1.0]) / np.linalg.norm([-2.0, 0.3, 1.0]) * 2.0
        direction = (target - origin) / np.linalg.norm(target - origin)
        hit = ray_cast(mesh, origin, direction)
        assert hit is not None
        oracle = brute_force_cast(mesh, origin, direction)
        assert oracle is not None and oracle[1] == hit.triangle_id
        assert mesh.triangle_source[hit.triangle_id] == SOURCE_VIRTUAL

    def test_originals_unchanged(self):
        mesh = load_mesh(SINGLE_TRIANGLE)
        before = mesh.vertices.copy()
        merge_virtual(mesh, mesh, MeshTransform(identity_pose((5.0, 0.0, 0.0)), 2.0))
        assert np.array_equal(mesh.vertices, before)

    def test_scale_zero_rejected(self):
        with pytest.raises(ScaleNonPositive):
            MeshTransform(identity_pose(), 0.0)


class TestContainment:
    def sphere(self, roi, center, radius):
        return ColliderSpec(roi, (SphereVolume(np.array(center, dtype=float), radius),))

    def hit_at(self, point):
        from gazeguide.geometry import SurfaceHit

        return SurfaceHit(0, np.array(point, dtype=float), np.array([1.0, 0.0, 0.0]),
                          np.array([0.0, 0.0, 1.0]), 1.0)

    def test_point_at_center(self):
        colliders = [self.sphere(4, (1, 2, 3), 0.5)]
        assert containment(self.hit_at((1, 2, 3)), colliders) == 4

    def test_point_outside_all(self):
        colliders = [self.sphere(1, (0, 0, 0), 0.5), self.sphere(2, (3, 0, 0), 0.5)]
        assert containment(self.hit_at((1.5, 0, 0)), colliders) is None

    def test_overlap_prefers_smaller_total_volume(self):
        # radii from the target volumes; oracle: direct volume comparison
        r1 = (1.0 * 3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)  # 1 m^3
        r2 = (2.0 * 3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)  # 2 m^3
        assert 4.0 / 3.0 * math.pi * r1**3 < 4.0 / 3.0 * math.pi * r2**3
        colliders = [self.sphere(5, (0, 0, 0), r2), self.sphere(9, (0.1, 0, 0), r1)]
        assert containment(self.hit_at((0.05, 0, 0)), colliders) == 9

    def test_volume_tie_breaks_on_lower_roi_id(self):
        colliders = [self.sphere(7, (0, 0, 0), 0.5), self.sphere(2, (0.1, 0, 0), 0.5)]
        assert containment(self.hit_at((0.05, 0, 0)), colliders) == 2


class TestPuck:
    def hit_at(self, point, normal=(0.0, 0.0, 1.0)):
        from gazeguide.geometry import SurfaceHit

        return SurfaceHit(0, np.array(point, dtype=float), np.array([1.0, 0.0, 0.0]),
                          as_direction(normal), 1.0)

    def test_tau_zero_snaps(self):
        puck = puck_step(PuckState(), self.hit_at((0, 0, 0)), 1 / 60, tau=0.0)
        puck = puck_step(puck, self.hit_at((1, 2, 3)), 1 / 60, tau=0.0)
        assert np.allclose(puck.display_point, (1, 2, 3), atol=0)

    def test_first_contact_snaps(self):
        puck = puck_step(PuckState(), self.hit_at((1, 1, 1)), 1 / 60, tau=0.05)
        assert np.array_equal(puck.display_point, (1, 1, 1))

    def test_convergence_matches_closed_form(self):
        # oracle: residual after n steps is exp(-n*dt/tau) times the offset
        dt, tau = 1 / 60.0, 0.05
        puck = puck_step(PuckState(), self.hit_at((0, 0, 0)), dt, tau)
        target = self.hit_at((0.01, 0.0, 0.0))
        n = round(10 * tau / dt)  # ten time constants
        for _ in range(n):
            puck = puck_step(puck, target, dt, tau)
        expected_residual = 0.01 * math.exp(-n * dt / tau)
        actual_residual = 0.01 - puck.display_point[0]
        assert actual_residual == pytest.approx(expected_residual, rel=1e-9)
        assert abs(actual_residual) < 1e-6

    def test_hold_last_on_miss(self):
        puck = puck_step(PuckState(), self.hit_at((1, 1, 1)), 1 / 60)
        held = puck_step(puck, None, 1 / 60)
        assert held.current_hit is None
        assert np.array_equal(held.display_point, puck.display_point)
        assert np.array_equal(held.display_normal, puck.display_normal)

    def test_dt_must_be_positive(self):
        with pytest.raises(ValueError):
            puck_step(PuckState(), None, 0.0)


class TestTypes:
    def test_direction_must_be_unit(self):
        with pytest.raises(ValueError):
            as_direction((1.0, 1.0, 0.0))
        as_direction((0.0, 1.0, 0.0))

    def test_pose_quaternion_must_be_unit(self):
        with pytest.raises(ValueError):
            Pose6DoF(np.zeros(3), np.array([1.0, 1.0, 0.0, 0.0]))

    def test_mesh_invariants(self):
        with pytest.raises(Exception):
            TriangleMesh(np.zeros((3, 3)), np.empty((0, 3), dtype=int), np.empty(0, dtype=np.uint8))
        with pytest.raises(Exception):
            TriangleMesh(
                np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]]),
                np.array([[0, 1, 5]]),
                np.zeros(1, dtype=np.uint8),
            )

    def test_forward_is_rotated_minus_z(self):
        # 90 degrees about +Y turns -Z into -X
        q = np.array([math.cos(math.pi / 4), 0.0, math.sin(math.pi / 4), 0.0])
        pose = Pose6DoF(np.zeros(3), q)
        assert np.allclose(pose.forward(), (-1.0, 0.0, 0.0), atol=1e-12)
