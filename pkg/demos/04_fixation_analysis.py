"""Gaze-trace analysis: fixations, per-roi viewing time, derived regions.

Demonstrates:
- generating a walk-around trace with dwells at every region
- dispersion-threshold fixation detection on the surface hit points
- per-roi viewing statistics (and their CSV export)
- recovering candidate roi colliders from nothing but the gaze record

Run: python3 demos/04_fixation_analysis.py
"""
import numpy as np

from gazeguide import derive_rois, fixation_detect, make_viktoria_scene, roi_stats
from gazeguide.raycast import MeshIndex
from gazeguide.sim import Waypoint, scripted_generator
from gazeguide.trace import surface_hit_points

scene = make_viktoria_scene()
index = MeshIndex(scene.mesh)

# a visitor circling the statue, pausing 3 s at each region of interest
waypoints = [Waypoint(roi, hold=3.0, transit=0.8) for roi in sorted(scene.script.roi_units)]
trace = scripted_generator(waypoints, scene, noise_sigma=0.005, seed=42, index=index)
print(f"trace: {len(trace)} samples over {trace.duration:.1f} s")

times, points = surface_hit_points(trace, scene.mesh, index)
print(f"on-surface samples: {len(times)}")

fixations = fixation_detect(times, points, dispersion_radius=0.10, min_duration=0.25)
print(f"\nfixations (dispersion 0.10 m, min 0.25 s): {len(fixations)}")
for f in fixations:
    c = ", ".join(f"{v:+.2f}" for v in f.centroid)
    print(f"  {f.start:6.2f}s - {f.end:6.2f}s  ({f.duration:4.2f} s) at [{c}]")

stats = roi_stats(trace, scene.mesh, scene.colliders, index)
print("\nviewing time per region:")
for roi in sorted(stats.per_roi):
    t = stats.per_roi[roi]
    label = scene.scenario.collider(roi).label
    print(f"  roi {roi} ({label:28s}) {t.seconds:5.2f} s, "
          f"first look {t.first_look:6.2f} s, {t.entries} entries")
print(f"  off-roi: {stats.off_roi_seconds:.2f} s")

# close the loop: cluster the fixations back into collider candidates
candidates = derive_rois(fixations, cluster_radius=0.30, min_total_duration=1.5)
print(f"\nderived {len(candidates)} roi candidates from the gaze record:")
for cand in candidates:
    center = cand.volumes[0].center
    best = min(
        scene.colliders,
        key=lambda c: float(np.linalg.norm(c.volumes[0].center - center)),
    )
    offset = float(np.linalg.norm(best.volumes[0].center - center))
    print(f"  candidate {cand.roi_id} -> matches roi {best.roi_id} "
          f"({best.label}) within {offset:.3f} m")
