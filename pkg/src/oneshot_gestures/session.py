"""Trigger-delimited segmentation of a keypoint stream, and the stream file format.

A stream is a JSON Lines file: a header line, then frame and trigger
events in time order::

    {"type": "header", "version": 1, "width": 640, "height": 480}
    {"type": "event", "name": "trigger", "t": 0.0}
    {"type": "frame", "t": 0.0, "keypoints": {"right_wrist": [412.5, 230.0], ...}}
    ...
    {"type": "event", "name": "trigger", "t": 3.1}

The first trigger starts a recording and the next one (after a debounce
window) ends it.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import OutOfOrder, ParseError
from .trajectory import GestureTrajectory, KeypointFrame

log = logging.getLogger(__name__)

STREAM_VERSION = 1
DEBOUNCE = 0.75
MIN_FRAMES = 5
TIME_SLACK = 1e-3
STANDARD_IDS = ("left_shoulder", "right_shoulder", "left_hip", "right_hip",
                "left_wrist", "right_wrist", "left_elbow", "right_elbow")

IDLE = "idle"
RECORDING = "recording"


@dataclass(frozen=True)
class TriggerEvent:
    t: float


StreamEvent = Union[KeypointFrame, TriggerEvent]


@dataclass
class SessionState:
    phase: str = IDLE
    buffer: list = field(default_factory=list)
    debounce_until: float = 0.0
    last_t: float | None = None


def step(state: SessionState, ev: StreamEvent) -> tuple[SessionState, GestureTrajectory | None]:
    """Advance the session by one event; returns the state and any finished gesture.

    ``state`` is updated in place (one session per stream).
    """
    if state.last_t is not None and ev.t < state.last_t - TIME_SLACK:
        raise OutOfOrder(f"event at t={ev.t} after t={state.last_t}")
    t = ev.t if state.last_t is None else max(ev.t, state.last_t)
    state.last_t = t

    if isinstance(ev, TriggerEvent):
        if state.phase == IDLE:
            state.phase = RECORDING
            state.buffer = []
            state.debounce_until = t + DEBOUNCE
            return state, None
        if t < state.debounce_until:
            return state, None
        frames, state.buffer, state.phase = state.buffer, [], IDLE
        if len(frames) < MIN_FRAMES:
            log.warning("dropping gesture ending at t=%.3f: only %d frame(s)", t, len(frames))
            return state, None
        return state, GestureTrajectory(frames)

    if state.phase == RECORDING:
        if ev.t != t:
            ev = KeypointFrame(t, ev.keypoints, ev.confidence)
        state.buffer.append(ev)
    return state, None


def segment_stream(events: Iterable[StreamEvent]) -> list[GestureTrajectory]:
    state = SessionState()
    out = []
    for ev in events:
        state, traj = step(state, ev)
        if traj is not None:
            out.append(traj)
    if state.phase == RECORDING:
        log.warning("discarding unterminated recording (%d frame(s))", len(state.buffer))
    return out


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    version: int = STREAM_VERSION


def _parse_point(value, lineno, kid):
    if (not isinstance(value, list) or len(value) not in (2, 3)
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise ParseError("keypoint must be [x, y] or [x, y, confidence]", line=lineno,
                         field=f"keypoints.{kid}")
    return float(value[0]), float(value[1]), (float(value[2]) if len(value) == 3 else None)


def parse_stream(text: str) -> tuple[StreamHeader, list[StreamEvent]]:
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines:
        raise ParseError("empty stream", line=1)
    records = []
    for lineno, ln in lines:
        try:
            rec = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=lineno) from None
        if not isinstance(rec, dict) or "type" not in rec:
            raise ParseError("record needs a 'type'", line=lineno, field="type")
        records.append((lineno, rec))

    lineno, head = records[0]
    if head["type"] != "header":
        raise ParseError("first line must be a header", line=lineno, field="type")
    if head.get("version") != STREAM_VERSION:
        raise ParseError(f"unsupported stream version {head.get('version')!r}",
                         line=lineno, field="version")
    try:
        header = StreamHeader(int(head["width"]), int(head["height"]))
    except (KeyError, TypeError, ValueError):
        raise ParseError("header needs integer width and height", line=lineno) from None

    events: list[StreamEvent] = []
    for lineno, rec in records[1:]:
        t = rec.get("t")
        if not isinstance(t, (int, float)) or isinstance(t, bool) or t < 0:
            raise ParseError("'t' must be a non-negative number", line=lineno, field="t")
        if rec["type"] == "frame":
            kps = rec.get("keypoints")
            if not isinstance(kps, dict):
                raise ParseError("frame needs a keypoints object", line=lineno, field="keypoints")
            pos, conf = {}, {}
            for kid, value in kps.items():
                x, y, c = _parse_point(value, lineno, kid)
                pos[kid] = (x, y)
                if c is not None:
                    conf[kid] = c
            try:
                events.append(KeypointFrame(float(t), pos, conf or None))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
        elif rec["type"] == "event":
            if rec.get("name") != "trigger":
                raise ParseError(f"unknown event {rec.get('name')!r}", line=lineno, field="name")
            events.append(TriggerEvent(float(t)))
        else:
            raise ParseError(f"unknown record type {rec['type']!r}", line=lineno, field="type")
    return header, events


def format_stream(events: Iterable[StreamEvent], width: int, height: int) -> str:
    lines = [json.dumps({"type": "header", "version": STREAM_VERSION,
                         "width": width, "height": height})]
    for ev in events:
        if isinstance(ev, TriggerEvent):
            lines.append(json.dumps({"type": "event", "name": "trigger", "t": ev.t}))
        else:
            kps = {}
            for kid, (x, y) in ev.keypoints.items():
                c = (ev.confidence or {}).get(kid)
                kps[kid] = [x, y] if c is None else [x, y, c]
            lines.append(json.dumps({"type": "frame", "t": ev.t, "keypoints": kps}))
    return "\n".join(lines) + "\n"


def bracket(traj: GestureTrajectory, pad: float = 0.05) -> list[StreamEvent]:
    """Events for one recording wrapped in start/stop triggers."""
    start = max(0.0, traj.frames[0].t - pad)
    stop = max(traj.frames[-1].t + pad, start + DEBOUNCE)
    return [TriggerEvent(start), *traj.frames, TriggerEvent(stop)]
