"""Replay script generation: timed sendevent scripts and high-level input scripts.

The sendevent flavor reproduces the raw event log exactly (RERAN-style); the
adb-input flavor approximates each classified step with one `input` command,
which survives device differences but drops multi-touch detail.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .events import InputEvent
from .gestures import GestureKind, UserInteraction

# gaps shorter than this merge into the next sleep; shell sleeps below 10ms
# are noise on a real device
SLEEP_FLOOR_US = 10_000


class ReplayScriptError(ValueError):
    pass


@dataclass(frozen=True)
class ReplayTiming:
    """preserve: recorded gaps; fixed_gap: constant gap; max_speed: no sleeps."""

    mode: str = "preserve"
    gap_ms: int = 0

    def __post_init__(self):
        if self.mode not in ("preserve", "fixed_gap", "max_speed"):
            raise ValueError(f"unknown timing mode {self.mode!r}")
        if self.mode == "fixed_gap" and self.gap_ms < 0:
            raise ValueError("fixed_gap requires a non-negative gap")

    def label(self) -> str:
        if self.mode == "fixed_gap":
            return f"fixed_gap:{self.gap_ms}"
        return self.mode


PRESERVE = ReplayTiming("preserve")
MAX_SPEED = ReplayTiming("max_speed")


def parse_timing(text: str) -> ReplayTiming:
    """Parse `preserve`, `max_speed`, or `fixed_gap:<ms>`."""
    if text in ("preserve", "max_speed"):
        return ReplayTiming(text)
    m = re.fullmatch(r"fixed_gap:(\d+)", text)
    if m is None:
        raise ValueError(f"unknown timing mode {text!r}; use preserve, max_speed, or fixed_gap:<ms>")
    return ReplayTiming("fixed_gap", int(m.group(1)))


def default_device_map(events: Iterable[InputEvent]) -> dict[int, str]:
    return {i: f"/dev/input/event{i}" for i in sorted({e.device_index for e in events})}


def _sleep_line(ms: int) -> str:
    return f"sleep {ms // 1000}.{ms % 1000:03d}"


def emit_sendevent_script(
    events: Sequence[InputEvent],
    device_map: Optional[dict[int, str]] = None,
    timing: ReplayTiming = PRESERVE,
    report_id: Optional[str] = None,
) -> str:
    """Render the exact-replay shell script.

    In preserve mode, inter-event gaps accumulate until they reach the 10ms
    floor and are then emitted as one sleep, floored to whole milliseconds
    with the sub-millisecond part carried forward; leftover time is flushed
    as a final sleep so the script's total sleep time never exceeds, and
    stays within one millisecond per sleep of, the recorded duration.
    """
    if device_map is None:
        device_map = default_device_map(events)
    lines = ["# replay script (sendevent flavor)"]
    if report_id is not None:
        lines.append(f"# report: {report_id}")
    lines.append(f"# timing: {timing.label()}")

    pending = 0  # microseconds not yet emitted as sleep
    for i, ev in enumerate(events):
        path = device_map.get(ev.device_index)
        if path is None:
            raise ReplayScriptError(f"no device path mapped for device index {ev.device_index}")
        if i > 0:
            if timing.mode == "preserve":
                pending += ev.timestamp - events[i - 1].timestamp
                if pending >= SLEEP_FLOOR_US:
                    ms = pending // 1000
                    lines.append(_sleep_line(ms))
                    pending -= ms * 1000
            elif timing.mode == "fixed_gap" and timing.gap_ms > 0:
                lines.append(_sleep_line(timing.gap_ms))
        lines.append(f"sendevent {path} {ev.ev_type} {ev.ev_code} {ev.ev_value}")
    if timing.mode == "preserve" and pending >= 1000:
        lines.append(_sleep_line(pending // 1000))
    return "\n".join(lines) + "\n"


_SENDEVENT_RE = re.compile(
    r"^sendevent\s+(\S+)\s+(-?\d+)\s+(-?\d+)\s+(-?\d+)\s*$"
)
_SLEEP_RE = re.compile(r"^sleep\s+(\d+)\.(\d{1,3})\s*$")
_DEVICE_PATH_RE = re.compile(r"(\d+)$")


def parse_sendevent_script(text: str) -> tuple[list[InputEvent], list[int]]:
    """Invert emit_sendevent_script.

    Returns the event list with timestamps rebuilt from the sleep directives
    (first event at 0) plus the raw sleep durations in microseconds.  Unknown
    directives fail with their line number.
    """
    events: list[InputEvent] = []
    sleeps: list[int] = []
    t = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _SLEEP_RE.match(stripped)
        if m is not None:
            us = int(m.group(1)) * 1_000_000 + int(m.group(2).ljust(3, "0")) * 1000
            sleeps.append(us)
            t += us
            continue
        m = _SENDEVENT_RE.match(stripped)
        if m is not None:
            path = m.group(1)
            dev = _DEVICE_PATH_RE.search(path)
            if dev is None:
                raise ReplayScriptError(f"line {line_no}: device path {path!r} has no index")
            events.append(
                InputEvent(t, int(dev.group(1)), int(m.group(2)), int(m.group(3)), int(m.group(4)))
            )
            continue
        raise ReplayScriptError(f"line {line_no}: unknown directive {stripped!r}")
    return events, sleeps


def emit_adb_script(
    steps: Sequence[UserInteraction], report_id: Optional[str] = None
) -> str:
    """Render the portable approximation: one `input` command per step."""
    lines = ["# replay script (adb input flavor)"]
    if report_id is not None:
        lines.append(f"# report: {report_id}")
    for i, step in enumerate(steps):
        if i > 0:
            gap_us = max(step.start_time - steps[i - 1].end_time, 0)
            gap_ms = round(gap_us / 1000)
            if gap_ms > 0:
                lines.append(_sleep_line(gap_ms))
        lines.append(f"# step {step.index}: {step.description}")
        kind = step.kind
        if kind is GestureKind.TAP:
            x, y = step.start_point
            lines.append(f"input tap {x} {y}")
        elif kind is GestureKind.SWIPE:
            a, b = step.start_point, step.end_point
            lines.append(f"input swipe {a[0]} {a[1]} {b[0]} {b[1]} {step.duration_ms}")
        elif kind is GestureKind.LONG_PRESS:
            x, y = step.start_point
            lines.append(f"input swipe {x} {y} {x} {y} {step.duration_ms}")
        elif kind is GestureKind.KEY_PRESS:
            lines.append(f"input keyevent {step.key_code}")
        else:
            lines.append(
                "# multi-touch gesture omitted (input has no multi-finger form);"
                " use the sendevent replay script for an exact reproduction"
            )
    return "\n".join(lines) + "\n"
