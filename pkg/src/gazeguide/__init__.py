"""gazeguide: a deterministic engine for gaze-driven exhibit mediation.

A sliding-puck gaze cursor over a triangle world mesh, two-phase dwell-time
selection of regions of interest, and three initiative modes (guided,
self-guided, mixed) driving a nine-unit content script; plus trace analysis,
synthetic gaze generators, a headless runner, and a live session server.
"""

from .events import Event, parse_events, serialize_events
from .geometry import (
    ColliderSpec,
    MeshTransform,
    Pose6DoF,
    PuckState,
    SphereVolume,
    SurfaceHit,
    TriangleMesh,
    containment,
    load_mesh,
    merge_virtual,
    puck_step,
)
from .interaction import SelectionConfig, selection_step
from .mediation import (
    GUIDED,
    MIXED,
    MODES,
    SELF_GUIDED,
    ContentUnit,
    MediationState,
    SessionScript,
    enabled_set,
    mediation_step,
    pick_system_cue,
)
from .raycast import MeshIndex, ray_cast
from .scenario import (
    Scene,
    ScenarioFile,
    load_scene,
    make_viktoria_demo,
    make_viktoria_scene,
    parse_scenario,
    serialize_scenario,
    validate_scenario,
    write_demo_assets,
)
from .sim import (
    Engine,
    RunReport,
    Waypoint,
    orbit_generator,
    run_headless,
    run_with_agent,
    scripted_generator,
)
from .trace import (
    Fixation,
    GazeSample,
    GazeTrace,
    RoiStats,
    derive_rois,
    fixation_detect,
    parse_trace,
    roi_stats,
    serialize_trace,
)

__version__ = "0.1.0"
