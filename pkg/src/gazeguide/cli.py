"""Command line entry point.

Subcommands: demo (emit the bundled scenario + meshes), validate, simulate
(headless run over a recorded trace or a generator), analyze (fixations,
roi stats, derived rois), serve (the live session server).

Exit codes: 0 success, 2 validation findings, 1 errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .mediation import GUIDED, MODES
from .raycast import MeshIndex
from .scenario import load_scene, validate_scenario, write_demo_assets
from .sim import Waypoint, orbit_generator, run_headless, scripted_generator
from .trace import derive_rois, fixation_detect, parse_trace, roi_stats, serialize_trace, surface_hit_points


def _cmd_demo(args) -> int:
    paths = write_demo_assets(args.out)
    for p in paths:
        print(p)
    return 0


def _cmd_validate(args) -> int:
    scene = load_scene(args.scenario)
    findings = validate_scenario(scene.scenario, scene.mesh)
    for f in findings:
        print(f"{f.kind}: {f.message}")
    if findings:
        print(f"{len(findings)} finding(s)")
        return 2
    print("ok: no findings")
    return 0


def _tour_waypoints(scene, seed: int, rng) -> list[Waypoint]:
    """A seeded sightseeing tour: rest out the intro, then visit every roi in
    a shuffled order with enough dwell to select it and a rest in between."""
    rest = (0.0, 8.0, 0.0)
    rois = sorted(scene.script.roi_units)
    rng.shuffle(rois)
    wps = [Waypoint(rest, hold=scene.scenario.unit(scene.script.intro).duration + 0.5)]
    for roi in rois:
        unit_id = scene.script.roi_units[roi]
        duration = scene.scenario.unit(unit_id).duration
        wps.append(Waypoint(roi, hold=4.0 + 4.0 / 60.0, transit=0.4))
        wps.append(Waypoint(rest, hold=duration + 1.0, transit=0.4))
    return wps


def _cmd_simulate(args) -> int:
    scene = load_scene(args.scenario)
    index = MeshIndex(scene.mesh)
    if args.trace:
        trace = parse_trace(Path(args.trace).read_text(encoding="utf-8"))
    elif args.gen == "scripted":
        rng = np.random.Generator(np.random.PCG64(args.seed))
        trace = scripted_generator(
            _tour_waypoints(scene, args.seed, rng), scene,
            noise_sigma=args.noise, seed=args.seed, index=index,
        )
    elif args.gen == "orbit":
        trace = orbit_generator(
            radius=2.0, angular_speed=2.0 * math.pi / max(args.duration, 1e-6),
            height=1.6, duration=args.duration, seed=args.seed, noise_sigma=args.noise,
        )
    else:
        print("simulate needs --trace or --gen", file=sys.stderr)
        return 1

    log_text, report = run_headless(scene, args.mode, trace, index=index)
    if args.out_events:
        Path(args.out_events).write_text(log_text, encoding="utf-8")
    if args.out_trace:
        Path(args.out_trace).write_text(serialize_trace(trace), encoding="utf-8")
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_analyze(args) -> int:
    scene = load_scene(args.scenario)
    index = MeshIndex(scene.mesh)
    trace = parse_trace(Path(args.trace).read_text(encoding="utf-8"))

    times, points = surface_hit_points(trace, scene.mesh, index)
    fixations = fixation_detect(times, points, args.radius, args.min_duration)
    print(f"samples: {len(trace)}  on-surface: {len(times)}  fixations: {len(fixations)}")
    for f in fixations:
        c = ", ".join(f"{v:.3f}" for v in f.centroid)
        print(f"  {f.start:8.3f}s .. {f.end:8.3f}s  ({f.duration:5.2f} s, {f.sample_count} samples) at [{c}]")

    stats = roi_stats(trace, scene.mesh, scene.colliders, index)
    print("per-roi viewing time:")
    for roi in sorted(stats.per_roi):
        t = stats.per_roi[roi]
        first = "-" if t.first_look is None else f"{t.first_look:.2f}s"
        print(f"  roi {roi}: {t.seconds:6.2f} s  first look {first:>8}  entries {t.entries}")
    print(f"  off-roi: {stats.off_roi_seconds:.2f} s of {stats.duration:.2f} s")
    if args.csv:
        Path(args.csv).write_text(stats.to_csv(), encoding="utf-8")
        print(f"wrote {args.csv}")

    candidates = derive_rois(fixations, args.cluster_radius, args.min_cluster_duration)
    print(f"derived roi candidates: {len(candidates)}")
    for c in candidates:
        v = c.volumes[0]
        center = ", ".join(f"{x:.3f}" for x in v.center)
        print(f"  candidate {c.roi_id}: center [{center}] radius {v.radius}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, host=args.host, scenario_dir=args.scenario_dir,
          static_dir=args.static_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazeguide")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", help="write the bundled demo assets")
    p.add_argument("--out", default="viktoria-demo", help="output directory")
    p.set_defaults(fn=_cmd_demo)

    p = sub.add_parser("validate", help="check a scenario against its mesh")
    p.add_argument("scenario")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("simulate", help="headless session run")
    p.add_argument("--mode", choices=list(MODES), default=GUIDED)
    p.add_argument("--scenario", required=True)
    p.add_argument("--trace", help="replay a recorded .trace.jsonl")
    p.add_argument("--gen", choices=["scripted", "orbit"], help="generate the gaze trace")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0, help="angular noise sigma (rad)")
    p.add_argument("--duration", type=float, default=30.0, help="orbit duration (s)")
    p.add_argument("--out-events", help="write the event log here")
    p.add_argument("--out-trace", help="write the generated trace here")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("analyze", help="fixations, roi stats, derived rois")
    p.add_argument("--trace", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--radius", type=float, default=0.10, help="fixation dispersion radius (m)")
    p.add_argument("--min-duration", type=float, default=0.25, help="minimum fixation span (s)")
    p.add_argument("--cluster-radius", type=float, default=0.30)
    p.add_argument("--min-cluster-duration", type=float, default=1.0)
    p.add_argument("--csv", help="write roi stats as CSV")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("serve", help="run the live session server")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--scenario-dir", help="directory of *.scenario.json files")
    p.add_argument("--static-dir", help="UI bundle to serve at /")
    p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # uniform error exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
