"""Two-phase gaze selection: hover -> highlight + dwell -> confirm.

A pure, tick-driven transition function. All timers are integer tick counts
(the step precondition dt == cfg.tick makes this lossless), which keeps every
run bit-reproducible. Timings follow the interaction design: two seconds of
hovering arms the region, a two-second dwell timer confirms it; a system cue
skips the hover and goes straight to the dwell.

Leaving a region freezes its timer and starts a grace countdown; within the
grace window a return resumes, beyond it the phase resets fully to Idle. The
hover + dwell double threshold plus full reset on exit is the guard against
accidental look-to-select (the "Midas touch").
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .events import (
    CONTENT_FINISHED,
    CONTENT_STARTED,
    DWELL_PROGRESS,
    DWELL_STARTED,
    GAZE_ENTERED_ROI,
    GAZE_EXITED_ROI,
    PARTICLES_CLEARED,
    ROI_HIGHLIGHTED,
    SELECTION_CONFIRMED,
    Event,
    ev,
)


class CueNotEnabled(ValueError):
    def __init__(self, cue: int):
        super().__init__(f"cued roi {cue} is not in the enabled set")
        self.cue = cue


@dataclass(frozen=True)
class SelectionConfig:
    hover_duration: float = 2.0
    dwell_duration: float = 2.0
    exit_grace: float = 0.3
    tick: float = 1.0 / 60.0

    def __post_init__(self):
        for name in ("hover_duration", "dwell_duration", "exit_grace", "tick"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"{name} must be strictly positive")
        if not self.exit_grace < self.hover_duration:
            raise ValueError("exit_grace must be shorter than hover_duration")

    @property
    def tick_rate(self) -> int:
        return round(1.0 / self.tick)

    @property
    def hover_ticks(self) -> int:
        return max(1, round(self.hover_duration / self.tick))

    @property
    def dwell_ticks(self) -> int:
        return max(1, round(self.dwell_duration / self.tick))

    @property
    def grace_ticks(self) -> int:
        return max(1, round(self.exit_grace / self.tick))

    def ticks_for(self, seconds: float) -> int:
        return max(1, round(seconds / self.tick))


@dataclass(frozen=True)
class Idle:
    pass


@dataclass(frozen=True)
class Hovering:
    roi: int
    elapsed: int = 0  # in-roi ticks; frozen while out of the roi
    grace: int = 0  # consecutive out-of-roi ticks


@dataclass(frozen=True)
class Dwelling:
    roi: int
    elapsed: int = 0
    grace: int = 0


@dataclass(frozen=True)
class Delivering:
    """A content unit is playing. `pending` tracks a selection being built up
    in parallel, which the mode controller allows by leaving rois enabled.
    The playing unit's own roi (`roi`, None for auto-started units) is not
    re-selectable until the unit finishes, so sustained gaze cannot restart
    it; replays need a fresh selection afterwards."""

    unit_id: str
    duration: int
    elapsed: int = 0
    pending: Union[Idle, Hovering, Dwelling] = field(default_factory=Idle)
    roi: Optional[int] = None


SelectionPhase = Union[Idle, Hovering, Dwelling, Delivering]

PointerPhase = Union[Idle, Hovering, Dwelling]


def phase_seconds(phase: SelectionPhase, cfg: SelectionConfig) -> float:
    """Elapsed time of the current phase in seconds."""
    if isinstance(phase, Idle):
        return 0.0
    return phase.elapsed * cfg.tick


def dwell_fraction(phase: SelectionPhase, cfg: SelectionConfig) -> Optional[float]:
    """Dwell-timer fill 0..1, considering a pending dwell during delivery."""
    if isinstance(phase, Dwelling):
        return phase.elapsed / cfg.dwell_ticks
    if isinstance(phase, Delivering) and isinstance(phase.pending, Dwelling):
        return phase.pending.elapsed / cfg.dwell_ticks
    return None


def _step_pointer(
    sub: PointerPhase,
    gazed: Optional[int],
    cue: Optional[int],
    enabled: frozenset[int],
    cfg: SelectionConfig,
    tick: int,
    events: list[Event],
) -> tuple[PointerPhase, Optional[int]]:
    """Advance the hover/dwell pointer machine one tick.

    Returns (new sub-phase, confirmed roi or None). Emits gaze and dwell
    events into `events`.
    """
    if isinstance(sub, Idle):
        if cue is not None:
            # `enabled` here is the caller's selectable set, which excludes a
            # currently playing unit's roi; a cue on it stays inert till then
            if gazed == cue and cue in enabled:
                events.append(ev(tick, GAZE_ENTERED_ROI, roi=cue))
                events.append(ev(tick, DWELL_STARTED, roi=cue))
                return Dwelling(cue), None
            return sub, None
        if gazed is not None and gazed in enabled:
            events.append(ev(tick, GAZE_ENTERED_ROI, roi=gazed))
            return Hovering(gazed), None
        return sub, None

    if isinstance(sub, Hovering):
        # a cue voids any user-path hover, as does the roi being disabled
        if cue is not None or sub.roi not in enabled:
            events.append(ev(tick, GAZE_EXITED_ROI, roi=sub.roi))
            return _step_pointer(Idle(), gazed, cue, enabled, cfg, tick, events)
        if gazed == sub.roi:
            elapsed = sub.elapsed + 1
            if elapsed >= cfg.hover_ticks:
                events.append(ev(tick, ROI_HIGHLIGHTED, roi=sub.roi))
                events.append(ev(tick, DWELL_STARTED, roi=sub.roi))
                return Dwelling(sub.roi), None
            return Hovering(sub.roi, elapsed), None
        grace = sub.grace + 1
        if grace > cfg.grace_ticks:
            events.append(ev(tick, GAZE_EXITED_ROI, roi=sub.roi))
            return _step_pointer(Idle(), gazed, cue, enabled, cfg, tick, events)
        return Hovering(sub.roi, sub.elapsed, grace), None

    assert isinstance(sub, Dwelling)
    if (cue is not None and sub.roi != cue) or sub.roi not in enabled:
        events.append(ev(tick, GAZE_EXITED_ROI, roi=sub.roi))
        return _step_pointer(Idle(), gazed, cue, enabled, cfg, tick, events)
    if gazed == sub.roi:
        elapsed = sub.elapsed + 1
        events.append(ev(tick, DWELL_PROGRESS, roi=sub.roi, fraction=elapsed / cfg.dwell_ticks))
        if elapsed >= cfg.dwell_ticks:
            return Idle(), sub.roi
        return Dwelling(sub.roi, elapsed), None
    grace = sub.grace + 1
    if grace > cfg.grace_ticks:
        events.append(ev(tick, GAZE_EXITED_ROI, roi=sub.roi))
        return _step_pointer(Idle(), gazed, cue, enabled, cfg, tick, events)
    return Dwelling(sub.roi, sub.elapsed, grace), None


def _confirm(
    roi: int,
    tick: int,
    unit_for_roi: Mapping[int, tuple[str, int]],
    events: list[Event],
) -> Delivering:
    unit_id, duration = unit_for_roi[roi]
    events.append(ev(tick, SELECTION_CONFIRMED, roi=roi))
    events.append(ev(tick, PARTICLES_CLEARED))
    events.append(ev(tick, CONTENT_STARTED, unit=unit_id))
    return Delivering(unit_id, duration, roi=roi)


def start_delivery(
    unit_id: str, duration_ticks: int, tick: int, events: list[Event]
) -> Delivering:
    """Force-start a unit (used for the auto-played intro and conclusion)."""
    events.append(ev(tick, CONTENT_STARTED, unit=unit_id))
    return Delivering(unit_id, max(1, duration_ticks))


def selection_step(
    phase: SelectionPhase,
    gazed_roi: Optional[int],
    cue: Optional[int],
    enabled: frozenset[int],
    cfg: SelectionConfig,
    dt: float,
    *,
    tick: int,
    unit_for_roi: Mapping[int, tuple[str, int]],
) -> tuple[SelectionPhase, list[Event]]:
    """Advance the selection machine by one tick and emit its events.

    `tick` is the integer engine tick used to timestamp events; `unit_for_roi`
    maps roi -> (unit_id, duration_ticks) so a confirmation can start its
    content in the same tick.

    With no cue, a gazed enabled roi is hovered for hover_duration, then
    highlighted and dwelled for dwell_duration, then confirmed; a cue makes
    only the cued roi selectable and skips the hover. Confirmation emits
    SelectionConfirmed, ParticlesCleared and ContentStarted back to back.
    """
    if dt != cfg.tick:
        raise ValueError(f"dt ({dt}) must equal cfg.tick ({cfg.tick})")
    if cue is not None and cue not in enabled:
        raise CueNotEnabled(cue)

    events: list[Event] = []
    if isinstance(phase, Delivering):
        elapsed = phase.elapsed + 1
        finished = elapsed >= phase.duration
        if finished:
            events.append(ev(tick, CONTENT_FINISHED, unit=phase.unit_id))
        selectable = enabled if phase.roi is None else enabled - {phase.roi}
        pending, confirmed = _step_pointer(
            phase.pending, gazed_roi, cue, selectable, cfg, tick, events
        )
        if confirmed is not None:
            # an interrupted unit emits no ContentFinished
            return _confirm(confirmed, tick, unit_for_roi, events), events
        if finished:
            return pending, events
        return Delivering(phase.unit_id, phase.duration, elapsed, pending, phase.roi), events

    new_phase, confirmed = _step_pointer(phase, gazed_roi, cue, enabled, cfg, tick, events)
    if confirmed is not None:
        return _confirm(confirmed, tick, unit_for_roi, events), events
    return new_phase, events
