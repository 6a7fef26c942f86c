"""The three initiative modes over identical content.

Demonstrates:
- guided: the system cues one region after another, fixed order, no repeats
- self-guided: everything selectable, any order, repeats allowed
- mixed: turns alternate after every delivery; the system pushes the four
  core regions; the conclusion follows once the core set is covered

Run: python3 demos/03_three_modes.py
"""
from gazeguide import GUIDED, MIXED, SELF_GUIDED, make_viktoria_scene
from gazeguide.raycast import MeshIndex
from gazeguide.sim import CueChaser, FixedChoiceAgent, RandomGazeAgent, run_with_agent

scene = make_viktoria_scene()
index = MeshIndex(scene.mesh)
print(f"scenario '{scene.scenario.scenario_id}': "
      f"{len(scene.colliders)} regions, {len(scene.scenario.units)} content units, "
      f"core set {sorted(scene.script.core_set)}")


def narrate(title, engine):
    report = engine.report()
    print(f"\n{title}")
    for unit, started, finished in report.deliveries:
        print(f"  {started / 60:7.2f}s  {unit}")
    cues = [e.payload["roi"] for e in engine.log if e.type == "system_cue_shown"]
    switches = [e.payload["holder"] for e in engine.log if e.type == "initiative_switched"]
    print(f"  -> completed: {report.completion}  system cues: {cues or '-'}")
    if switches:
        print(f"  -> initiative hand-overs: {' -> '.join(switches)}")


# guided: an obedient visitor who looks where the particles appear
engine, _ = run_with_agent(scene, GUIDED, CueChaser(scene, index), 60 * 180, index=index)
narrate("GUIDED - the system leads, one cue at a time:", engine)

# self-guided: a curious visitor hopping between favourite spots
engine, _ = run_with_agent(
    scene, SELF_GUIDED,
    RandomGazeAgent(scene, seed=11, index=index, retarget_ticks=280, chase_bias=0.0),
    60 * 90, index=index,
)
narrate("SELF-GUIDED - the visitor leads (free order, repeats fine):", engine)

# mixed: the visitor keeps returning to the wings; the system still gets
# its four core regions delivered by alternating the initiative
engine, _ = run_with_agent(scene, MIXED, FixedChoiceAgent(scene, 3, index=index),
                           60 * 240, index=index)
narrate("MIXED - alternating turns, system pushes the core set {1,2,4,6}:", engine)
