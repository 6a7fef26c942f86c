"""The two-phase dwell selection, tick by tick.

Demonstrates:
- hover (2 s) -> highlight + dwell (2 s) -> confirmation on the user path
- the cue path skipping the hover phase
- the exit grace: brief glances away freeze the timers instead of resetting
- why a wandering gaze never selects anything (Midas-touch guard)

Run: python3 demos/02_dwell_selection.py
"""
from gazeguide import SelectionConfig
from gazeguide.interaction import Idle, selection_step

cfg = SelectionConfig()  # 2.0 s hover, 2.0 s dwell, 0.3 s grace, 60 Hz
units = {r: (f"unit-{r}", cfg.ticks_for(4.0)) for r in range(1, 8)}
enabled = frozenset(range(1, 8))


def run(gazed_for_tick, cue=None, ticks=400):
    phase = Idle()
    log = []
    for tick in range(ticks):
        phase, events = selection_step(
            phase, gazed_for_tick(tick), cue, enabled, cfg, cfg.tick,
            tick=tick, unit_for_roi=units,
        )
        log.extend(events)
    return log


def show(title, log):
    print(f"\n{title}")
    for e in log:
        if e.type == "dwell_progress" and e.payload["fraction"] not in (0.25, 0.5, 0.75, 1.0):
            continue  # keep the printout short
        print(f"  t={e.t / 60:6.3f}s  {e.type:20s} {e.payload}")


# 1. steady gaze on roi 3: confirmation lands exactly at 4.0 s
show("steady gaze on roi 3 (user path):",
     run(lambda t: 3))

# 2. a glance away for 0.2 s (inside the grace) only delays the confirmation
show("gaze with a 0.2 s glance away at 1.0 s (grace absorbs it):",
     run(lambda t: None if 60 <= t < 72 else 3))

# 3. leaving for 0.5 s (beyond the grace) resets everything
show("gaze leaves for 0.5 s at 1.9 s (full reset, restart):",
     run(lambda t: 2 if t < 114 or t >= 144 else None, ticks=400))

# 4. the system cue path has no hover phase: 2.0 s from entry
show("cued roi 4, gaze arrives at 1.0 s (cue path, no hover):",
     run(lambda t: 4 if t >= 60 else None, cue=4, ticks=200))

# 5. flitting gaze: nothing ever confirms
flitting = run(lambda t: (t // 90) % 7 + 1, ticks=1800)  # 1.5 s per roi
confirmed = [e for e in flitting if e.type == "selection_confirmed"]
print(f"\nwandering gaze (1.5 s per roi, 30 s): {len(confirmed)} selections "
      f"- the hover+dwell double threshold defeats the Midas touch.")
