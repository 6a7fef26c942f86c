import numpy as np
import pytest

from gazeguide.events import MalformedRecord, VersionMismatch
from gazeguide.geometry import Pose6DoF, pose_looking_at
from gazeguide.raycast import MeshIndex
from gazeguide.scenario import make_viktoria_scene
from gazeguide.sim import Waypoint, scripted_generator
from gazeguide.trace import (
    Fixation,
    GazeSample,
    GazeTrace,
    derive_rois,
    fixation_detect,
    parse_trace,
    roi_stats,
    serialize_trace,
    surface_hit_points,
)


def oracle_fixations(times, points, radius, min_duration):
    """Exhaustive all-windows oracle: precompute validity of every window from
    scratch, then apply the documented greedy left-to-right rule."""
    n = len(times)
    points = np.asarray(points, dtype=float).reshape(-1, 3)

    def ok(i, j):
        window = points[i : j + 1]
        centroid = window.mean(axis=0)
        return bool((np.linalg.norm(window - centroid, axis=1) <= radius).all())

    valid = {(i, j): ok(i, j) for i in range(n) for j in range(i, n)}
    out = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and valid[(i, j + 1)]:
            j += 1
        if times[j] - times[i] >= min_duration:
            out.append((i, j))
            i = j + 1
        else:
            i += 1
    return out


def jitter_trace(rng, n, centers, hop_every=20, scale=0.03):
    """Random walk that occasionally hops between cluster centers."""
    times = np.arange(n) / 60.0
    points = np.empty((n, 3))
    c = centers[0]
    for k in range(n):
        if k % hop_every == 0:
            c = centers[int(rng.integers(len(centers)))]
        points[k] = c + rng.normal(0, scale, 3)
    return times, points


class TestFixationDetect:
    def test_single_point_is_one_fixation(self):
        n = 300  # 5 s at 60 Hz
        times = np.arange(n) / 60.0
        points = np.tile([1.0, 2.0, 3.0], (n, 1))
        fx = fixation_detect(times, points, 0.1, 0.2)
        assert len(fx) == 1
        assert fx[0].start == 0.0
        assert fx[0].end == pytest.approx(times[-1])
        assert fx[0].sample_count == n
        assert np.allclose(fx[0].centroid, (1, 2, 3))

    def test_alternating_far_points_no_fixation(self):
        n = 120
        times = np.arange(n) / 60.0
        points = np.array([[0.0, 0, 0] if k % 2 == 0 else [1.0, 0, 0] for k in range(n)])
        assert fixation_detect(times, points, 0.1, 0.2) == []

    def test_empty_input(self):
        assert fixation_detect([], np.empty((0, 3)), 0.1, 0.2) == []

    def test_matches_exhaustive_oracle_on_random_traces(self):
        rng = np.random.default_rng(17)
        for case in range(60):
            n = int(rng.integers(5, 120))
            centers = rng.uniform(-1, 1, size=(int(rng.integers(1, 4)), 3))
            times, points = jitter_trace(rng, n, centers)
            radius = float(rng.uniform(0.05, 0.2))
            min_dur = float(rng.uniform(0.1, 0.5))
            got = fixation_detect(times, points, radius, min_dur)
            expected = oracle_fixations(times, points, radius, min_dur)
            assert [(f.start, f.end, f.sample_count) for f in got] == [
                (times[i], times[j], j - i + 1) for i, j in expected
            ]

    def test_members_within_radius_of_centroid_and_disjoint(self):
        rng = np.random.default_rng(23)
        times, points = jitter_trace(rng, 400, rng.uniform(-1, 1, (3, 3)))
        fx = fixation_detect(times, points, 0.12, 0.25)
        assert fx, "expected at least one fixation"
        prev_end = -1.0
        for f in fx:
            assert f.start > prev_end
            prev_end = f.end
            member = points[(times >= f.start) & (times <= f.end)]
            assert (np.linalg.norm(member - f.centroid, axis=1) <= 0.12).all()

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            fixation_detect([0.0], np.zeros((1, 3)), 0.0, 0.1)
        with pytest.raises(ValueError):
            fixation_detect([0.0], np.zeros((1, 3)), 0.1, -1.0)


@pytest.fixture(scope="module")
def scene():
    return make_viktoria_scene()


@pytest.fixture(scope="module")
def index(scene):
    return MeshIndex(scene.mesh)


class TestRoiStats:
    def test_steady_gaze_accumulates_full_duration(self, scene, index):
        trace = scripted_generator([Waypoint(4, hold=10.0)], scene, 0.0, seed=0, index=index)
        stats = roi_stats(trace, scene.mesh, scene.colliders, index)
        assert stats.per_roi[4].seconds == pytest.approx(10.0, abs=0.05)
        assert stats.per_roi[4].first_look == 0.0
        assert stats.per_roi[4].entries == 1
        assert stats.off_roi_seconds == pytest.approx(0.0, abs=1e-9)

    def test_missing_the_mesh_counts_off_roi(self, scene, index):
        pose = pose_looking_at((0.0, 10.0, 4.0), (0.0, 10.0, 0.0))
        trace = GazeTrace(tuple(GazeSample(k / 60.0, pose) for k in range(120)))
        stats = roi_stats(trace, scene.mesh, scene.colliders, index)
        assert all(t.seconds == 0.0 for t in stats.per_roi.values())
        assert stats.off_roi_seconds == pytest.approx(trace.duration)

    def test_waypoint_ground_truth(self, scene, index):
        trace = scripted_generator(
            [Waypoint(3, hold=2.0), Waypoint(5, hold=3.0)], scene, 0.0, seed=0, index=index
        )
        stats = roi_stats(trace, scene.mesh, scene.colliders, index)
        assert stats.per_roi[3].seconds == pytest.approx(2.0, abs=0.05)
        assert stats.per_roi[5].seconds == pytest.approx(3.0, abs=0.05)
        for roi in (1, 2, 4, 6, 7):
            assert stats.per_roi[roi].seconds == 0.0

    def test_resampling_invariance(self, scene, index):
        trace = scripted_generator(
            [Waypoint(2, hold=1.5), Waypoint(7, hold=2.0, transit=0.5)],
            scene, 0.0, seed=3, index=index,
        )
        doubled = []
        for k, s in enumerate(trace.samples):
            doubled.append(s)
            if k + 1 < len(trace.samples):
                mid_t = (s.t + trace.samples[k + 1].t) / 2.0
                doubled.append(GazeSample(mid_t, s.pose))  # sample-and-hold midpoint
        dense = GazeTrace(tuple(doubled))
        a = roi_stats(trace, scene.mesh, scene.colliders, index)
        b = roi_stats(dense, scene.mesh, scene.colliders, index)
        for roi in a.per_roi:
            assert a.per_roi[roi].seconds == pytest.approx(b.per_roi[roi].seconds, abs=0.05)

    def test_csv_export(self, scene, index):
        trace = scripted_generator([Waypoint(4, hold=1.0)], scene, 0.0, seed=0, index=index)
        stats = roi_stats(trace, scene.mesh, scene.colliders, index)
        csv_text = stats.to_csv()
        assert csv_text.splitlines()[0] == "roi_id,seconds,first_look,entries"
        assert any(line.startswith("4,") for line in csv_text.splitlines())
        assert any(line.startswith("off_roi,") for line in csv_text.splitlines())


class TestDeriveRois:
    def fixation(self, center, duration, start=0.0):
        return Fixation(start, start + duration, np.array(center, dtype=float), 10)

    def test_two_groups_give_two_candidates(self):
        fx = [
            self.fixation((0, 0, 0), 1.0, 0.0),
            self.fixation((0.05, 0, 0), 0.5, 2.0),
            self.fixation((1.0, 0, 0), 0.8, 4.0),
            self.fixation((1.02, 0.02, 0), 0.4, 6.0),
        ]
        out = derive_rois(fx, cluster_radius=0.3, min_total_duration=0.5)
        assert len(out) == 2

    def test_empty_input(self):
        assert derive_rois([], 0.3, 0.5) == []

    def test_weak_clusters_dropped(self):
        fx = [self.fixation((0, 0, 0), 0.3), self.fixation((2, 0, 0), 2.0, 1.0)]
        out = derive_rois(fx, cluster_radius=0.3, min_total_duration=0.5)
        assert len(out) == 1
        assert np.allclose(out[0].volumes[0].center, (2, 0, 0))

    def test_centers_are_duration_weighted(self):
        fx = [self.fixation((0, 0, 0), 3.0), self.fixation((0.2, 0, 0), 1.0, 4.0)]
        out = derive_rois(fx, cluster_radius=0.5, min_total_duration=0.5)
        assert len(out) == 1
        assert out[0].volumes[0].center[0] == pytest.approx(0.05)


class TestSerialization:
    def make_trace(self, n=50, seed=1):
        rng = np.random.default_rng(seed)
        samples = []
        for k in range(n):
            q = rng.normal(size=4)
            q /= np.linalg.norm(q)
            samples.append(GazeSample(k / 60.0, Pose6DoF(rng.uniform(-2, 2, 3), q)))
        return GazeTrace(tuple(samples))

    def test_round_trip_identity(self):
        trace = self.make_trace()
        assert parse_trace(serialize_trace(trace)) == trace

    def test_large_trace_round_trips_byte_identically(self):
        trace = self.make_trace(10_000, seed=9)
        text = serialize_trace(trace)
        assert serialize_trace(parse_trace(text)) == text

    def test_truncated_line_reports_line_number(self):
        text = serialize_trace(self.make_trace(5))
        broken = text[: text.rfind('{"t"') + 12]
        with pytest.raises(MalformedRecord) as err:
            parse_trace(broken)
        assert err.value.line_no == 6

    def test_version_mismatch(self):
        text = serialize_trace(self.make_trace(2)).replace('"version":1', '"version":2')
        with pytest.raises(VersionMismatch):
            parse_trace(text)

    def test_timestamps_must_increase(self):
        pose = Pose6DoF(np.zeros(3), np.array([1.0, 0, 0, 0]))
        with pytest.raises(ValueError):
            GazeTrace((GazeSample(0.0, pose), GazeSample(0.0, pose)))


class TestSurfaceHits:
    def test_hits_only_when_on_mesh(self):
        scene = make_viktoria_scene()
        index = MeshIndex(scene.mesh)
        on = scripted_generator([Waypoint(4, hold=0.5)], scene, 0.0, seed=0, index=index)
        times, points = surface_hit_points(on, scene.mesh, index)
        assert len(times) == len(on)
        pose = pose_looking_at((0, 10.0, 4.0), (0, 10.0, 0.0))
        off = GazeTrace(tuple(GazeSample(k / 60.0, pose) for k in range(30)))
        times, points = surface_hit_points(off, scene.mesh, index)
        assert len(times) == 0
