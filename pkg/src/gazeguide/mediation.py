"""Initiative-mode controllers: guided, self-guided, and mixed.

Each controller consumes the tick's interaction events and answers with
directives: which roi (if any) the system is cueing, which rois may be
selected this tick, and whether a unit must auto-start (intro, conclusion).
All three draw from the same session script; the controllers hold no content
of their own, so every mode delivers identical material.

Mode posture:
  guided      system picks the next roi, one cue at a time, fixed order, a
              delivered unit is never re-enabled, playback is uninterruptible;
  self-guided no cue, everything selectable, repeats allowed, playback
              interruptible; the conclusion follows once all seven roi units
              have been delivered at least once;
  mixed       turns alternate after every completed delivery, starting with
              the user after the intro; on system turns the cue is the
              lowest-id core roi not yet delivered; the conclusion follows
              once the declared core set is covered.

A delivery counts when its unit finishes; an interrupted unit does not count.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .events import (
    CONCLUSION_STARTED,
    CONTENT_FINISHED,
    CONTENT_STARTED,
    INITIATIVE_SWITCHED,
    SELECTION_CONFIRMED,
    SESSION_COMPLETED,
    SYSTEM_CUE_SHOWN,
    SYSTEM_CUE_WITHDRAWN,
    Event,
    ev,
)

GUIDED = "guided"
SELF_GUIDED = "self"
MIXED = "mixed"
MODES = (GUIDED, SELF_GUIDED, MIXED)

UNIT_KINDS = ("audio", "image_set", "timeline", "reconstruction", "augmentation", "text")

INTRO = "intro"
EXPLORING = "exploring"
CONCLUSION = "conclusion"
DONE = "done"

USER = "user"
SYSTEM = "system"


class EventOutOfProtocol(RuntimeError):
    """An engine bug: an event arrived that the issued directives forbid."""


class NoEligibleRoi(LookupError):
    pass


@dataclass(frozen=True)
class ContentUnit:
    unit_id: str
    kind: str
    duration: float
    transcript: str = ""
    asset_refs: tuple[str, ...] = ()
    linked_roi: Optional[int] = None
    is_core: bool = False

    def __post_init__(self):
        if self.kind not in UNIT_KINDS:
            raise ValueError(f"unit {self.unit_id}: unknown kind {self.kind!r}")
        if not (self.duration > 0.0):
            raise ValueError(f"unit {self.unit_id}: duration must be > 0")
        object.__setattr__(self, "asset_refs", tuple(self.asset_refs))


@dataclass(frozen=True)
class SessionScript:
    """The nine-unit session: intro, one unit per roi, conclusion."""

    intro: str
    conclusion: str
    roi_units: dict[int, str]
    guided_order: tuple[int, ...]
    core_set: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "roi_units", dict(self.roi_units))
        object.__setattr__(self, "guided_order", tuple(self.guided_order))
        object.__setattr__(self, "core_set", frozenset(self.core_set))
        rois = set(self.roi_units)
        if sorted(self.guided_order) != sorted(rois):
            raise ValueError("guided_order must be a permutation of the roi ids")
        if not self.core_set:
            raise ValueError("core_set must not be empty")
        if not self.core_set <= rois:
            raise ValueError("core_set must be a subset of the roi ids")
        units = list(self.roi_units.values())
        if len(set(units)) != len(units):
            raise ValueError("each roi must link a distinct unit")
        if self.intro == self.conclusion or self.intro in units or self.conclusion in units:
            raise ValueError("intro and conclusion must be distinct, non-roi units")

    @property
    def all_rois(self) -> frozenset[int]:
        return frozenset(self.roi_units)

    def roi_of_unit(self, unit_id: str) -> Optional[int]:
        for roi, unit in self.roi_units.items():
            if unit == unit_id:
                return roi
        return None

    def core_units(self) -> frozenset[str]:
        return frozenset(self.roi_units[r] for r in self.core_set)


@dataclass(frozen=True)
class MediationState:
    phase: str = INTRO
    delivered: tuple[str, ...] = ()
    initiative: str = USER
    guided_cursor: int = 0
    playing: Optional[str] = None
    active_cue: Optional[int] = None
    last_enabled: frozenset[int] = frozenset()
    intro_issued: bool = False
    conclusion_issued: bool = False

    def delivered_rois(self, script: SessionScript) -> set[int]:
        unit_rois = {unit: roi for roi, unit in script.roi_units.items()}
        return {unit_rois[u] for u in self.delivered if u in unit_rois}


@dataclass(frozen=True)
class Directives:
    """Controller output for one tick. `events` are the controller's own
    emissions (cues, initiative switches, conclusion/session markers)."""

    cue: Optional[int]
    enabled: frozenset[int]
    start_unit: Optional[str]
    events: tuple[Event, ...] = ()


def initial_state() -> MediationState:
    return MediationState()


def pick_system_cue(state: MediationState, script: SessionScript, mode: str) -> int:
    """The roi the system cues next: guided follows the scripted order, mixed
    takes the lowest-id core roi whose unit has not been delivered."""
    if mode == GUIDED:
        if state.guided_cursor >= len(script.guided_order):
            raise NoEligibleRoi("guided tour exhausted")
        return script.guided_order[state.guided_cursor]
    if mode == MIXED:
        for roi in sorted(script.core_set):
            if script.roi_units[roi] not in state.delivered:
                return roi
        raise NoEligibleRoi("all core rois delivered")
    raise ValueError(f"no system cue in mode {mode!r}")


def _cue_and_enabled(
    state: MediationState, script: SessionScript, mode: str
) -> tuple[Optional[int], frozenset[int]]:
    if state.phase != EXPLORING:
        return None, frozenset()
    if state.playing is not None:
        # per-mode interruptibility while a unit plays
        if mode == SELF_GUIDED or (mode == MIXED and state.initiative == USER):
            return None, script.all_rois
        return None, frozenset()
    if mode == GUIDED:
        cue = pick_system_cue(state, script, mode)
        return cue, frozenset((cue,))
    if mode == SELF_GUIDED:
        return None, script.all_rois
    if state.initiative == USER:
        return None, script.all_rois
    cue = pick_system_cue(state, script, mode)
    return cue, frozenset((cue,))


def enabled_set(state: MediationState, script: SessionScript, mode: str) -> frozenset[int]:
    if state.phase != EXPLORING:
        raise ValueError("enabled_set is defined for the exploring phase")
    return _cue_and_enabled(state, script, mode)[1]


def _conclusion_due(state: MediationState, script: SessionScript, mode: str) -> bool:
    if mode == GUIDED:
        return state.guided_cursor >= len(script.guided_order)
    if mode == SELF_GUIDED:
        return state.delivered_rois(script) == set(script.all_rois)
    return script.core_units() <= set(state.delivered)


def mediation_step(
    state: MediationState,
    events: Sequence[Event],
    script: SessionScript,
    mode: str,
    *,
    tick: int,
) -> tuple[MediationState, Directives]:
    """Advance the mode controller by one tick.

    Consumes the tick's interaction events in order and returns the new state
    plus directives (cue, enabled set, any unit to auto-start) along with the
    controller's own events.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")

    phase = state.phase
    delivered = list(state.delivered)
    initiative = state.initiative
    cursor = state.guided_cursor
    playing = state.playing
    out: list[Event] = []

    for e in events:
        if e.type == SELECTION_CONFIRMED:
            roi = e.payload["roi"]
            if roi not in state.last_enabled:
                raise EventOutOfProtocol(
                    f"tick {tick}: roi {roi} confirmed but enabled set was "
                    f"{sorted(state.last_enabled)}"
                )
        elif e.type == CONTENT_STARTED:
            playing = e.payload["unit"]
        elif e.type == CONTENT_FINISHED:
            unit = e.payload["unit"]
            playing = None
            delivered.append(unit)
            if phase == INTRO and unit == script.intro:
                phase = EXPLORING
            elif phase == CONCLUSION and unit == script.conclusion:
                phase = DONE
                out.append(ev(tick, SESSION_COMPLETED))
            elif phase == EXPLORING:
                if mode == GUIDED:
                    cursor += 1
                elif mode == MIXED:
                    initiative = SYSTEM if initiative == USER else USER
                    out.append(ev(tick, INITIATIVE_SWITCHED, holder=initiative))

    start_unit: Optional[str] = None
    intro_issued = state.intro_issued
    conclusion_issued = state.conclusion_issued
    if phase == INTRO and not intro_issued:
        start_unit = script.intro
        playing = script.intro
        intro_issued = True
    interim = replace(
        state,
        phase=phase,
        delivered=tuple(delivered),
        initiative=initiative,
        guided_cursor=cursor,
        playing=playing,
    )
    if phase == EXPLORING and not conclusion_issued and _conclusion_due(interim, script, mode):
        phase = CONCLUSION
        out.append(ev(tick, CONCLUSION_STARTED))
        start_unit = script.conclusion
        playing = script.conclusion
        conclusion_issued = True
        interim = replace(interim, phase=phase, playing=playing)

    cue, enabled = _cue_and_enabled(interim, script, mode)
    if cue != state.active_cue:
        if state.active_cue is not None:
            out.append(ev(tick, SYSTEM_CUE_WITHDRAWN, roi=state.active_cue))
        if cue is not None:
            out.append(ev(tick, SYSTEM_CUE_SHOWN, roi=cue))

    new_state = MediationState(
        phase=phase,
        delivered=tuple(delivered),
        initiative=initiative,
        guided_cursor=cursor,
        playing=playing,
        active_cue=cue,
        last_enabled=enabled,
        intro_issued=intro_issued,
        conclusion_issued=conclusion_issued,
    )
    return new_state, Directives(cue, enabled, start_unit, tuple(out))
