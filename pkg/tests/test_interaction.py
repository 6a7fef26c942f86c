import numpy as np
import pytest

from gazeguide.events import (
    CONTENT_FINISHED,
    CONTENT_STARTED,
    DWELL_PROGRESS,
    DWELL_STARTED,
    GAZE_ENTERED_ROI,
    GAZE_EXITED_ROI,
    PARTICLES_CLEARED,
    ROI_HIGHLIGHTED,
    SELECTION_CONFIRMED,
)
from gazeguide.interaction import (
    CueNotEnabled,
    Delivering,
    Dwelling,
    Hovering,
    Idle,
    SelectionConfig,
    selection_step,
)

CFG = SelectionConfig()
UNITS = {r: (f"u{r}", 10_000) for r in range(1, 8)}  # long units: no auto-finish
ALL = frozenset(range(1, 8))


def drive(gazed_seq, cue=None, enabled=ALL, cfg=CFG, units=UNITS, phase=None):
    """Run the machine over a gazed-roi sequence; cue/enabled may be per-tick
    callables. Returns (final phase, all events)."""
    phase = phase if phase is not None else Idle()
    events = []
    for tick, gazed in enumerate(gazed_seq):
        c = cue(tick) if callable(cue) else cue
        en = enabled(tick) if callable(enabled) else enabled
        phase, evs = selection_step(
            phase, gazed, c, en, cfg, cfg.tick, tick=tick, unit_for_roi=units
        )
        events.extend(evs)
    return phase, events


def reference_run(gazed_seq, cfg, cue=None, enabled=ALL, unit_ticks=10_000):
    """Independent tick-by-tick oracle: flat counters, no shared code with the
    implementation. Returns (confirm ticks, finish ticks)."""
    hover_n = round(cfg.hover_duration / cfg.tick)
    dwell_n = round(cfg.dwell_duration / cfg.tick)
    grace_n = round(cfg.exit_grace / cfg.tick)
    mode, roi, elapsed, grace = "idle", None, 0, 0
    playing = None  # (remaining ticks, roi that triggered it)
    confirms, finishes = [], []

    blocked_roi = None  # playing unit's roi, held through its finish tick

    def try_enter(gz):
        nonlocal mode, roi, elapsed, grace
        if gz == blocked_roi:
            return  # the playing unit's roi is not re-selectable
        if cue is not None:
            if gz == cue:
                mode, roi, elapsed, grace = "dwell", cue, 0, 0
        elif gz is not None and gz in enabled:
            mode, roi, elapsed, grace = "hover", gz, 0, 0

    for tick, gz in enumerate(gazed_seq):
        blocked_roi = playing[1] if playing is not None else None
        if playing is not None:
            remaining = playing[0] - 1
            if remaining == 0:
                finishes.append(tick)
                playing = None
            else:
                playing = (remaining, playing[1])
        if mode == "idle":
            try_enter(gz)
        elif gz == roi:
            elapsed += 1
            grace = 0
            if mode == "hover" and elapsed >= hover_n:
                mode, elapsed = "dwell", 0
            elif mode == "dwell" and elapsed >= dwell_n:
                confirms.append(tick)
                playing = (unit_ticks, roi)
                mode, roi, elapsed = "idle", None, 0
        else:
            grace += 1
            if grace > grace_n:
                mode, roi, elapsed, grace = "idle", None, 0, 0
                try_enter(gz)
    return confirms, finishes


def ticks(seconds, cfg=CFG):
    return round(seconds / cfg.tick)


def seq(*segments):
    """segments of (roi-or-None, seconds) -> per-tick gazed list."""
    out = []
    for roi, seconds in segments:
        out.extend([roi] * ticks(seconds))
    return out


def of_type(events, kind):
    return [e for e in events if e.type == kind]


class TestTimings:
    def test_continuous_gaze_confirms_at_four_seconds(self):
        gazed = seq((3, 5.0))
        phase, events = drive(gazed)
        started = of_type(events, CONTENT_STARTED)
        assert len(started) == 1
        assert abs(started[0].t * CFG.tick - 4.0) <= CFG.tick
        # oracle agreement
        confirms, _ = reference_run(gazed, CFG)
        assert [e.t for e in of_type(events, SELECTION_CONFIRMED)] == confirms
        # hover ends exactly at 2 s
        assert of_type(events, DWELL_STARTED)[0].t == ticks(2.0)

    def test_no_gaze_no_events(self):
        phase, events = drive([None] * 600)
        assert isinstance(phase, Idle)
        assert events == []

    def test_gaze_outside_enabled_set_ignored(self):
        phase, events = drive(seq((5, 3.0)), enabled=frozenset({1, 2}))
        assert isinstance(phase, Idle)
        assert events == []

    def test_exit_beyond_grace_resets(self):
        # 1.9 s in, 0.5 s out (> grace), 4.0 s back in -> one confirm at 6.4 s
        # (a run of n samples spans (n-1) ticks, so add one closing sample)
        gazed = seq((2, 1.9), (None, 0.5), (2, 4.0 + CFG.tick))
        phase, events = drive(gazed)
        confirms = of_type(events, SELECTION_CONFIRMED)
        assert len(confirms) == 1
        assert abs(confirms[0].t * CFG.tick - 6.4) <= CFG.tick
        oracle_confirms, _ = reference_run(gazed, CFG)
        assert [e.t for e in confirms] == oracle_confirms

    def test_exit_within_grace_freezes_timer(self):
        # 1.0 s in, 0.2 s out (< grace), back in -> confirm shifted by the gap
        gazed = seq((4, 1.0), (None, 0.2), (4, 4.0))
        _, events = drive(gazed)
        confirms = of_type(events, SELECTION_CONFIRMED)
        assert [e.t for e in confirms] == [ticks(4.0) + ticks(0.2)]
        assert of_type(events, GAZE_EXITED_ROI) == []
        oracle_confirms, _ = reference_run(gazed, CFG)
        assert [e.t for e in confirms] == oracle_confirms

    def test_cue_path_skips_hover(self):
        # cue on roi 4; gaze arrives at t = 1.0 and stays -> confirm at 3.0 s
        gazed = seq((None, 1.0), (4, 4.0))
        _, events = drive(gazed, cue=4, enabled=frozenset({4}))
        confirms = of_type(events, SELECTION_CONFIRMED)
        assert len(confirms) == 1
        assert abs(confirms[0].t * CFG.tick - 3.0) <= CFG.tick
        assert of_type(events, ROI_HIGHLIGHTED) == []
        oracle_confirms, _ = reference_run(gazed, CFG, cue=4, enabled=frozenset({4}))
        assert [e.t for e in confirms] == oracle_confirms

    def test_cue_ignores_other_rois(self):
        _, events = drive(seq((2, 5.0)), cue=4, enabled=frozenset({2, 4}))
        assert events == []


class TestEventProtocol:
    def test_confirmation_triple_same_tick(self):
        _, events = drive(seq((1, 4.5)))
        confirm = of_type(events, SELECTION_CONFIRMED)[0]
        i = events.index(confirm)
        assert events[i + 1].type == PARTICLES_CLEARED
        assert events[i + 2].type == CONTENT_STARTED
        assert events[i].t == events[i + 1].t == events[i + 2].t
        assert events[i + 2].payload["unit"] == "u1"

    def test_dwell_progress_monotone_to_one(self):
        _, events = drive(seq((6, 4.5)))
        fractions = [e.payload["fraction"] for e in of_type(events, DWELL_PROGRESS)]
        assert all(b >= a for a, b in zip(fractions, fractions[1:]))
        assert fractions[-1] == 1.0
        assert len(fractions) == CFG.dwell_ticks

    def test_enter_exit_events(self):
        _, events = drive(seq((3, 0.5), (None, 1.0), (5, 0.5)))
        entered = of_type(events, GAZE_ENTERED_ROI)
        exited = of_type(events, GAZE_EXITED_ROI)
        assert [e.payload["roi"] for e in entered] == [3, 5]
        assert [e.payload["roi"] for e in exited] == [3]

    def test_cue_not_enabled_raises(self):
        with pytest.raises(CueNotEnabled):
            selection_step(Idle(), None, 9, frozenset({1}), CFG, CFG.tick,
                           tick=0, unit_for_roi=UNITS)

    def test_determinism(self):
        gazed = seq((1, 1.3), (None, 0.25), (1, 3.4), (2, 2.0))
        a = drive(gazed)
        b = drive(gazed)
        assert a == b


class TestDelivering:
    def test_delivery_finishes_and_promotes_pending(self):
        units = {r: (f"u{r}", ticks(1.0)) for r in range(1, 8)}
        # confirm roi 1 at tick 240, then gaze roi 2 while the unit plays (1 s)
        gazed = seq((1, 4.0 + CFG.tick), (2, 2.5))
        phase, events = drive(gazed, units=units)
        finished = of_type(events, CONTENT_FINISHED)
        assert [e.payload["unit"] for e in finished] == ["u1"]
        assert finished[0].t == ticks(5.0)
        # pending hover on roi 2 survived the finish and kept accumulating
        assert isinstance(phase, Dwelling) and phase.roi == 2

    def test_interrupting_selection_cuts_unit_without_finish(self):
        units = {r: (f"u{r}", ticks(60.0)) for r in range(1, 8)}
        gazed = seq((1, 4.0 + CFG.tick), (2, 4.1))
        _, events = drive(gazed, units=units)
        started = [e.payload["unit"] for e in of_type(events, CONTENT_STARTED)]
        assert started == ["u1", "u2"]
        assert of_type(events, CONTENT_FINISHED) == []

    def test_disabled_while_delivering_blocks_reselection(self):
        units = {r: (f"u{r}", ticks(60.0)) for r in range(1, 8)}
        gazed = seq((1, 4.0 + CFG.tick), (2, 5.0))
        enabled = lambda tick: ALL if tick <= ticks(4.0) else frozenset()
        _, events = drive(gazed, enabled=enabled, units=units)
        assert [e.payload["unit"] for e in of_type(events, CONTENT_STARTED)] == ["u1"]
        assert len(of_type(events, GAZE_ENTERED_ROI)) == 1

    def test_sustained_gaze_cannot_restart_the_playing_unit(self):
        # staring on while the unit plays must not retrigger it
        units = {r: (f"u{r}", ticks(60.0)) for r in range(1, 8)}
        _, events = drive(seq((1, 12.0)), units=units)
        started = [e.payload["unit"] for e in of_type(events, CONTENT_STARTED)]
        assert started == ["u1"]

    def test_static_cue_stays_inert_while_its_unit_plays(self):
        # a cue left pointing at the playing unit's roi must not thrash the
        # pending machine with enter/exit noise
        units = {r: (f"u{r}", ticks(30.0)) for r in range(1, 8)}
        gazed = seq((4, 6.0))
        _, events = drive(gazed, cue=4, enabled=frozenset({4}), units=units)
        started = [e.t for e in of_type(events, CONTENT_STARTED)]
        assert started == [ticks(2.0)]
        after = [e for e in events if e.t > ticks(2.0)]
        assert of_type(after, GAZE_ENTERED_ROI) == []
        assert of_type(after, GAZE_EXITED_ROI) == []

    def test_replay_after_finish_by_sustained_gaze(self):
        # once the unit ends, continued gaze selects it again from scratch
        units = {r: (f"u{r}", ticks(1.0)) for r in range(1, 8)}
        gazed = seq((1, 12.0))
        _, events = drive(gazed, units=units)
        started = [e.t for e in of_type(events, CONTENT_STARTED)]
        # confirm at 240, finish at 300, re-entry 301, re-confirm 301 + 240
        assert started == [240, 541]
        confirms, finishes = reference_run(gazed, CFG, unit_ticks=ticks(1.0))
        assert started == confirms


class TestMidasResistance:
    def test_short_residences_never_confirm(self):
        # every in-roi run spans < 4.0 s and every gap exceeds the grace, so
        # no run can ever accumulate hover + dwell
        rng = np.random.default_rng(42)
        threshold = CFG.hover_ticks + CFG.dwell_ticks  # 240 ticks = 4.0 s
        for _ in range(300):
            gazed = []
            while len(gazed) < 900:
                gazed.extend([int(rng.integers(1, 8))] * int(rng.integers(1, threshold)))
                gazed.extend([None] * int(rng.integers(CFG.grace_ticks + 1, 3 * CFG.grace_ticks)))
            _, events = drive(gazed[:900])
            assert of_type(events, SELECTION_CONFIRMED) == []

    def test_threshold_is_exact(self):
        # a run of n samples spans (n-1) ticks: 241 samples = exactly 4.0 s
        _, events = drive([1] * (CFG.hover_ticks + CFG.dwell_ticks))
        assert of_type(events, SELECTION_CONFIRMED) == []
        _, events = drive([1] * (CFG.hover_ticks + CFG.dwell_ticks + 1))
        confirms = of_type(events, SELECTION_CONFIRMED)
        assert [e.t for e in confirms] == [CFG.hover_ticks + CFG.dwell_ticks]
