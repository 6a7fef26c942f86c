"""Interaction events and the JSON-lines event log.

Every event carries `t`, an integer engine tick (60 ticks per second by
default); seconds are t / tick_rate. Logs are one JSON object per line with
fixed field order {t, type, payload}, preceded by a header line, so identical
runs serialize to identical bytes on every platform.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

LOG_VERSION = 1

GAZE_ENTERED_ROI = "gaze_entered_roi"
GAZE_EXITED_ROI = "gaze_exited_roi"
ROI_HIGHLIGHTED = "roi_highlighted"
DWELL_STARTED = "dwell_started"
DWELL_PROGRESS = "dwell_progress"
SELECTION_CONFIRMED = "selection_confirmed"
PARTICLES_CLEARED = "particles_cleared"
CONTENT_STARTED = "content_started"
CONTENT_FINISHED = "content_finished"
SYSTEM_CUE_SHOWN = "system_cue_shown"
SYSTEM_CUE_WITHDRAWN = "system_cue_withdrawn"
INITIATIVE_SWITCHED = "initiative_switched"
CONCLUSION_STARTED = "conclusion_started"
SESSION_COMPLETED = "session_completed"

# payload keys per event type, in serialization order
EVENT_FIELDS: dict[str, tuple[str, ...]] = {
    GAZE_ENTERED_ROI: ("roi",),
    GAZE_EXITED_ROI: ("roi",),
    ROI_HIGHLIGHTED: ("roi",),
    DWELL_STARTED: ("roi",),
    DWELL_PROGRESS: ("roi", "fraction"),
    SELECTION_CONFIRMED: ("roi",),
    PARTICLES_CLEARED: (),
    CONTENT_STARTED: ("unit",),
    CONTENT_FINISHED: ("unit",),
    SYSTEM_CUE_SHOWN: ("roi",),
    SYSTEM_CUE_WITHDRAWN: ("roi",),
    INITIATIVE_SWITCHED: ("holder",),
    CONCLUSION_STARTED: (),
    SESSION_COMPLETED: (),
}


class MalformedRecord(ValueError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class VersionMismatch(ValueError):
    def __init__(self, found):
        super().__init__(f"unsupported log version {found!r} (expected {LOG_VERSION})")
        self.found = found


@dataclass(frozen=True)
class Event:
    """One timestamped interaction event. `t` is the engine tick."""

    t: int
    type: str
    payload: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        fields = EVENT_FIELDS.get(self.type)
        if fields is None:
            raise ValueError(f"unknown event type {self.type!r}")
        if tuple(self.payload.keys()) != fields:
            raise ValueError(
                f"{self.type} payload must have fields {fields}, got {tuple(self.payload)}"
            )

    def to_json(self) -> str:
        return json.dumps(
            {"t": self.t, "type": self.type, "payload": self.payload},
            separators=(",", ":"),
        )


def ev(t: int, type: str, **payload) -> Event:
    ordered = {k: payload[k] for k in EVENT_FIELDS[type]}
    return Event(t, type, ordered)


def serialize_events(events: Iterable[Event], tick_rate: int = 60) -> str:
    header = json.dumps(
        {"version": LOG_VERSION, "kind": "events", "tick_rate": tick_rate},
        separators=(",", ":"),
    )
    lines = [header]
    lines.extend(e.to_json() for e in events)
    return "\n".join(lines) + "\n"


def parse_events(text: str) -> tuple[list[Event], int]:
    """Parse an event log; returns (events, tick_rate)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedRecord(1, "empty log")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise MalformedRecord(1, f"bad header: {exc}") from None
    if not isinstance(header, dict) or header.get("kind") != "events":
        raise MalformedRecord(1, "header is not an event-log header")
    if header.get("version") != LOG_VERSION:
        raise VersionMismatch(header.get("version"))
    tick_rate = int(header.get("tick_rate", 60))
    events = []
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_no, f"bad record: {exc}") from None
        try:
            events.append(Event(int(obj["t"]), obj["type"], obj["payload"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRecord(line_no, str(exc)) from None
    return events, tick_rate
