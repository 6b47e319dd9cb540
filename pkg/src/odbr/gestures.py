"""Gesture analysis: group touch tracks into interactions, classify, describe.

The classifier is a small decision table over two thresholds: displacement
beyond the tap slop makes a swipe, and anything slower than the long-press
threshold upgrades a stationary contact.  Tracks whose contact intervals
overlap long enough merge into one multi-touch interaction; key presses are
interactions of their own.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

from .events import KeyPress, TouchTrack
from .hierarchy import AxisRanges, ComponentSummary, map_raw_to_screen


class GestureKind(str, Enum):
    TAP = "Tap"
    LONG_PRESS = "LongPress"
    SWIPE = "Swipe"
    MULTI_TOUCH = "MultiTouch"
    KEY_PRESS = "KeyPress"


@dataclass(frozen=True)
class GestureThresholds:
    tap_slop_px: int = 24
    long_press_ms: int = 500
    idle_timeout_ms: int = 5000
    multi_touch_overlap_ms: int = 50

    def __post_init__(self):
        for name in (
            "tap_slop_px",
            "long_press_ms",
            "idle_timeout_ms",
            "multi_touch_overlap_ms",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


_THRESHOLD_LINE_RE = re.compile(r"^\s*([a-z_]+)\s*[=:]\s*(\d+)\s*$")


def parse_thresholds_file(text: str) -> GestureThresholds:
    """Read `key = value` lines; `#` starts a comment; unknown keys rejected."""
    values: dict[str, int] = {}
    valid = {"tap_slop_px", "long_press_ms", "idle_timeout_ms", "multi_touch_overlap_ms"}
    for line_no, line in enumerate(text.splitlines(), start=1):
        bare = line.split("#", 1)[0]
        if not bare.strip():
            continue
        m = _THRESHOLD_LINE_RE.match(bare)
        if m is None or m.group(1) not in valid:
            raise ValueError(f"threshold file line {line_no}: cannot parse {line!r}")
        values[m.group(1)] = int(m.group(2))
    return GestureThresholds(**values)


@dataclass(frozen=True)
class InteractionSegment:
    """One interaction's raw constituents: touch tracks or a single key press."""

    tracks: tuple[TouchTrack, ...] = ()
    key: Optional[KeyPress] = None

    @property
    def start_time(self) -> int:
        if self.key is not None:
            return self.key.down_time
        return min(t.down_time for t in self.tracks)

    @property
    def end_time(self) -> int:
        if self.key is not None:
            return self.key.up_time
        return max(t.up_time for t in self.tracks)


@dataclass
class UserInteraction:
    index: int
    kind: GestureKind
    start_time: int
    end_time: int
    duration_ms: int
    start_point: Optional[tuple[int, int]] = None
    end_point: Optional[tuple[int, int]] = None
    finger_count: int = 0
    key_code: Optional[int] = None
    key_name: Optional[str] = None
    target: Optional[ComponentSummary] = None
    clickable_ancestor: Optional[ComponentSummary] = None
    screenshot_ref: Optional[str] = None
    ui_dump_ref: Optional[str] = None
    description: str = ""
    raw_tracks: tuple[TouchTrack, ...] = field(default=(), repr=False)
    raw_key: Optional[KeyPress] = field(default=None, repr=False)


def _overlap_us(a: TouchTrack, b: TouchTrack) -> int:
    return min(a.up_time, b.up_time) - max(a.down_time, b.down_time)


def segment_interactions(
    tracks: Sequence[TouchTrack],
    keys: Sequence[KeyPress],
    thresholds: GestureThresholds,
) -> list[InteractionSegment]:
    """Group tracks into segments; overlap join is transitive.

    Every input track lands in exactly one segment; key presses never merge
    with anything.  Output ordered by segment start time.
    """
    min_overlap = thresholds.multi_touch_overlap_ms * 1000
    parent = list(range(len(tracks)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(tracks)):
        for j in range(i + 1, len(tracks)):
            if _overlap_us(tracks[i], tracks[j]) >= min_overlap:
                parent[find(i)] = find(j)

    groups: dict[int, list[TouchTrack]] = {}
    for i, track in enumerate(tracks):
        groups.setdefault(find(i), []).append(track)

    segments = [
        InteractionSegment(tracks=tuple(sorted(g, key=lambda t: (t.down_time, t.tracking_id))))
        for g in groups.values()
    ]
    segments.extend(InteractionSegment(key=k) for k in keys)
    segments.sort(key=lambda s: (s.start_time, s.end_time))
    return segments


def classify(
    segment: InteractionSegment, thresholds: GestureThresholds, index: int = 0
) -> UserInteraction:
    """Apply the decision table; segment points must already be screen pixels."""
    start = segment.start_time
    end = segment.end_time
    duration_ms = round((end - start) / 1000)

    if segment.key is not None:
        key = segment.key
        return UserInteraction(
            index=index,
            kind=GestureKind.KEY_PRESS,
            start_time=start,
            end_time=end,
            duration_ms=duration_ms,
            key_code=key.key_code,
            key_name=key.key_name,
            raw_key=key,
        )

    if not segment.tracks or any(not t.points for t in segment.tracks):
        raise ValueError("segment has no touch points; upstream produced a malformed segment")

    first = segment.tracks[0]
    p0, p1 = first.points[0], first.points[-1]
    start_point = (p0.x, p0.y)
    end_point = (p1.x, p1.y)

    if len(segment.tracks) > 1:
        kind = GestureKind.MULTI_TOUCH
    else:
        dx = p1.x - p0.x
        dy = p1.y - p0.y
        # integer arithmetic keeps the slop boundary exact
        if dx * dx + dy * dy > thresholds.tap_slop_px**2:
            kind = GestureKind.SWIPE
        elif end - start >= thresholds.long_press_ms * 1000:
            kind = GestureKind.LONG_PRESS
        else:
            kind = GestureKind.TAP

    return UserInteraction(
        index=index,
        kind=kind,
        start_time=start,
        end_time=end,
        duration_ms=duration_ms,
        start_point=start_point,
        end_point=end_point,
        finger_count=len(segment.tracks),
        raw_tracks=segment.tracks,
    )


def build_interactions(
    tracks: Sequence[TouchTrack],
    keys: Sequence[KeyPress],
    thresholds: GestureThresholds,
) -> list[UserInteraction]:
    """Segment, classify, index, and give every interaction a description."""
    interactions = [
        classify(segment, thresholds, index=i)
        for i, segment in enumerate(segment_interactions(tracks, keys, thresholds))
    ]
    for interaction in interactions:
        interaction.description = describe(interaction)
    return interactions


@dataclass(frozen=True)
class IdleBoundary:
    timestamp: int
    after_index: Optional[int]  # None when the session had no interactions


def detect_idle(
    interactions: Sequence[UserInteraction],
    session_end: int,
    thresholds: GestureThresholds,
) -> list[IdleBoundary]:
    """One boundary per inactivity gap strictly longer than the idle timeout.

    Gaps are measured between consecutive interactions and from the last
    interaction to session end; an interaction-free session is one gap from
    zero.
    """
    timeout = thresholds.idle_timeout_ms * 1000
    boundaries = []
    if not interactions:
        if session_end > timeout:
            boundaries.append(IdleBoundary(timestamp=timeout, after_index=None))
        return boundaries
    for i, interaction in enumerate(interactions):
        gap_end = (
            interactions[i + 1].start_time if i + 1 < len(interactions) else session_end
        )
        if gap_end - interaction.end_time > timeout:
            boundaries.append(
                IdleBoundary(timestamp=interaction.end_time + timeout, after_index=i)
            )
    return boundaries


def _label(target: ComponentSummary) -> str:
    return target.text or target.resource_id or target.class_name


def describe(interaction: UserInteraction) -> str:
    """Render the fixed natural-language template for the interaction kind."""
    kind = interaction.kind
    at = interaction.start_point
    if kind is GestureKind.KEY_PRESS:
        if interaction.key_name:
            return f"Press {interaction.key_name}"
        return f"Press key {interaction.key_code}"
    if kind is GestureKind.SWIPE:
        a, b = interaction.start_point, interaction.end_point
        return f"Swipe from ({a[0]},{a[1]}) to ({b[0]},{b[1]})"
    if kind is GestureKind.MULTI_TOUCH:
        return (
            f"Multi-touch gesture with {interaction.finger_count} fingers"
            f" from ({at[0]},{at[1]})"
        )
    target = interaction.target
    if kind is GestureKind.LONG_PRESS:
        if target is not None:
            return (
                f"Long-press on {target.class_name} '{_label(target)}'"
                f" at ({at[0]},{at[1]}) for {interaction.duration_ms}ms"
            )
        return f"Long-press at ({at[0]},{at[1]}) for {interaction.duration_ms}ms"
    if target is not None:
        return f"Tap on {target.class_name} '{_label(target)}' at ({at[0]},{at[1]})"
    return f"Tap at ({at[0]},{at[1]})"


def map_track_to_screen(track: TouchTrack, ranges: AxisRanges) -> TouchTrack:
    """Project a raw-coordinate track into screen pixels, point by point."""
    mapped = []
    for p in track.points:
        x, y = map_raw_to_screen((p.x, p.y), ranges)
        mapped.append(replace(p, x=x, y=y))
    return replace(track, points=tuple(mapped))
