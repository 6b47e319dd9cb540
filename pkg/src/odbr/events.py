"""Input event ingestion: getevent text logs, raw evdev records, touch tracking.

Decodes the two transport formats a recording session produces (the hex text
emitted by the device's ``getevent -t`` utility and raw binary ``input_event``
records) into :class:`InputEvent` values, then reconstructs per-finger
:class:`TouchTrack` trajectories with a multi-touch protocol-B slot state
machine and pairs key down/up events into :class:`KeyPress` values.
"""

from __future__ import annotations

import logging
import re
import struct
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

logger = logging.getLogger(__name__)

# Event types (linux/input-event-codes.h)
EV_SYN = 0x00
EV_KEY = 0x01
EV_ABS = 0x03

SYN_REPORT = 0x00
SYN_MT_REPORT = 0x02  # protocol-A frame marker; we reject streams using it

ABS_MT_SLOT = 0x2F
ABS_MT_POSITION_X = 0x35
ABS_MT_POSITION_Y = 0x36
ABS_MT_TRACKING_ID = 0x39
ABS_MT_PRESSURE = 0x3A

_MT_CODES = frozenset(
    {ABS_MT_SLOT, ABS_MT_POSITION_X, ABS_MT_POSITION_Y, ABS_MT_TRACKING_ID, ABS_MT_PRESSURE}
)

# Key press value semantics
KEY_UP = 0
KEY_DOWN = 1
KEY_REPEAT = 2

# KEY_* codes end where the BTN_* block begins; BTN_TOUCH and friends are
# touch-device chatter, not hardware keys
BTN_CODE_START = 0x100


def is_hardware_key(code: int) -> bool:
    return 0 < code < BTN_CODE_START

# Common hardware keys seen on phones (linux/input-event-codes.h names, KEY_
# prefix dropped).  Codes outside this table keep key_name absent.
KEY_NAMES = {
    1: "ESC",
    14: "BACKSPACE",
    28: "ENTER",
    102: "HOME",
    103: "UP",
    105: "LEFT",
    106: "RIGHT",
    108: "DOWN",
    113: "MUTE",
    114: "VOLUMEDOWN",
    115: "VOLUMEUP",
    116: "POWER",
    139: "MENU",
    143: "WAKEUP",
    158: "BACK",
    164: "PLAYPAUSE",
    172: "HOMEPAGE",
    212: "CAMERA",
    217: "SEARCH",
    224: "BRIGHTNESSDOWN",
    225: "BRIGHTNESSUP",
    330: "BTN_TOUCH",
}


class GeteventParseError(ValueError):
    """A getevent log line did not match the documented grammar."""

    def __init__(self, message: str, line_no: int, text: str):
        super().__init__(f"line {line_no}: {message}: {text!r}")
        self.line_no = line_no
        self.text = text


class ProtocolAError(ValueError):
    """Stream uses anonymous (protocol A) multi-touch, which is unsupported."""


@dataclass(frozen=True)
class InputEvent:
    """One decoded evdev record, timestamped in microseconds since session epoch."""

    timestamp: int
    device_index: int
    ev_type: int
    ev_code: int
    ev_value: int


@dataclass(frozen=True)
class TouchPoint:
    timestamp: int
    x: int
    y: int
    pressure: Optional[int]
    slot: int
    tracking_id: int


@dataclass(frozen=True)
class TouchTrack:
    """One finger's trajectory from contact down to lift."""

    points: tuple[TouchPoint, ...]
    down_time: int
    up_time: int
    truncated: bool = False
    synthetic: bool = False  # opened implicitly to salvage a dropped open frame

    @property
    def tracking_id(self) -> int:
        return self.points[0].tracking_id

    @property
    def slot(self) -> int:
        return self.points[0].slot


@dataclass(frozen=True)
class KeyPress:
    key_code: int
    down_time: int
    up_time: int
    key_name: Optional[str] = None
    truncated: bool = False


# ---------------------------------------------------------------------------
# getevent text format

_EVENT_LINE_RE = re.compile(
    r"^(?:\[\s*(?P<sec>\d+)\.(?P<usec>\d+)\s*\]\s+)?"
    r"/dev/input/event(?P<dev>\d+):\s+"
    r"(?P<type>(?:0[xX])?[0-9a-fA-F]+)\s+"
    r"(?P<code>(?:0[xX])?[0-9a-fA-F]+)\s+"
    r"(?P<value>(?:0[xX])?[0-9a-fA-F]+)\s*$"
)

_ADD_DEVICE_RE = re.compile(r"^add device \d+:")
# getevent prints this for nodes it cannot open (e.g. /dev/input/mice)
_DRIVER_COMPLAINT_RE = re.compile(r"^could not get driver version for ")


def _signed32(value: int) -> int:
    return value - (1 << 32) if value >= (1 << 31) else value


def parse_getevent_line(
    line: str, line_no: int = 0, fill_timestamp: int = 0
) -> Optional[InputEvent]:
    """Parse one line of ``getevent -t`` output.

    Returns None for device-enumeration metadata (``add device`` headers and
    the indented property lines that follow them) and blank lines.  Lines
    recorded without the ``-t`` timestamp prefix receive ``fill_timestamp``,
    which log-level callers set to the previous event's timestamp.
    """
    stripped = line.rstrip("\n")
    if not stripped.strip():
        return None
    if (
        _ADD_DEVICE_RE.match(stripped)
        or _DRIVER_COMPLAINT_RE.match(stripped)
        or stripped[0] in (" ", "\t")
    ):
        return None
    m = _EVENT_LINE_RE.match(stripped)
    if m is None:
        if "/dev/input/" not in stripped:
            raise GeteventParseError("missing device path", line_no, stripped)
        raise GeteventParseError("malformed event line", line_no, stripped)
    if m.group("sec") is not None:
        # the sub-second field is a decimal fraction; getevent zero-pads to 6
        frac = m.group("usec").ljust(6, "0")[:6]
        timestamp = int(m.group("sec")) * 1_000_000 + int(frac)
    else:
        timestamp = fill_timestamp
    try:
        ev_type = int(m.group("type"), 16)
        ev_code = int(m.group("code"), 16)
        ev_value = _signed32(int(m.group("value"), 16))
    except ValueError as exc:  # pragma: no cover - regex already constrains this
        raise GeteventParseError(str(exc), line_no, stripped) from exc
    return InputEvent(timestamp, int(m.group("dev")), ev_type, ev_code, ev_value)


@dataclass
class GeteventLog:
    events: list[InputEvent]
    metadata_lines: int

    def __iter__(self):
        return iter(self.events)


def parse_getevent_log(text: str) -> GeteventLog:
    """Parse a full getevent transcript, filling timestampless lines monotonically."""
    events: list[InputEvent] = []
    metadata = 0
    prev_ts = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        ev = parse_getevent_line(line, line_no, fill_timestamp=prev_ts)
        if ev is None:
            if line.strip():
                metadata += 1
            continue
        events.append(ev)
        prev_ts = ev.timestamp
    return GeteventLog(events, metadata)


def format_getevent_line(ev: InputEvent) -> str:
    sec, usec = divmod(ev.timestamp, 1_000_000)
    return "[%8d.%06d] /dev/input/event%d: %04x %04x %08x" % (
        sec,
        usec,
        ev.device_index,
        ev.ev_type,
        ev.ev_code,
        ev.ev_value & 0xFFFFFFFF,
    )


def format_getevent_log(events: Iterable[InputEvent]) -> str:
    return "".join(format_getevent_line(ev) + "\n" for ev in events)


# ---------------------------------------------------------------------------
# binary evdev records


@dataclass(frozen=True)
class BinaryLayout:
    """Record layout for raw /dev/input/event* reads.

    64-bit userspace uses two 8-byte time fields (24-byte records); 32-bit
    uses two 4-byte fields (16-byte records).
    """

    time_width: int = 8
    byte_order: str = "<"

    def __post_init__(self):
        if self.time_width not in (4, 8):
            raise ValueError("time_width must be 4 or 8")
        if self.byte_order not in ("<", ">"):
            raise ValueError("byte_order must be '<' or '>'")

    @property
    def struct_format(self) -> str:
        time_fmt = "qq" if self.time_width == 8 else "ii"
        return self.byte_order + time_fmt + "HHi"

    @property
    def record_size(self) -> int:
        return struct.calcsize(self.struct_format)


DEFAULT_LAYOUT = BinaryLayout()


def decode_binary_stream(
    data: bytes, layout: BinaryLayout = DEFAULT_LAYOUT, device_index: int = 0
) -> tuple[list[InputEvent], int]:
    """Decode raw input_event records; returns (events, trailing remainder bytes)."""
    rec = struct.Struct(layout.struct_format)
    count, remainder = divmod(len(data), rec.size)
    events = []
    for i in range(count):
        tv_sec, tv_usec, ev_type, ev_code, ev_value = rec.unpack_from(data, i * rec.size)
        events.append(
            InputEvent(tv_sec * 1_000_000 + tv_usec, device_index, ev_type, ev_code, ev_value)
        )
    return events, remainder


def encode_binary_stream(
    events: Iterable[InputEvent], layout: BinaryLayout = DEFAULT_LAYOUT
) -> bytes:
    """Inverse of :func:`decode_binary_stream` (device index is not encoded)."""
    rec = struct.Struct(layout.struct_format)
    out = bytearray()
    for ev in events:
        sec, usec = divmod(ev.timestamp, 1_000_000)
        out += rec.pack(sec, usec, ev.ev_type, ev.ev_code, ev.ev_value)
    return bytes(out)


# ---------------------------------------------------------------------------
# multi-touch protocol-B slot tracking


@dataclass
class _Slot:
    tracking_id: int
    synthetic: bool = False
    x: Optional[int] = None
    y: Optional[int] = None
    pressure: Optional[int] = None
    dirty: bool = False
    pending_close: bool = False
    points: list[TouchPoint] = field(default_factory=list)


class MultiTouchTracker:
    """Incremental protocol-B slot state machine.

    ABS_MT_SLOT selects the active slot, ABS_MT_TRACKING_ID >= 0 opens a
    contact there (-1 closes it), position/pressure events update the active
    slot, and each SYN_REPORT commits a TouchPoint for every open slot whose
    state changed in the frame.
    """

    def __init__(self):
        self.current_slot = 0
        self.slots: dict[int, _Slot] = {}
        self.tracks: list[TouchTrack] = []
        self.unconsumed: list[InputEvent] = []
        self.warnings = 0

    def feed(self, ev: InputEvent) -> None:
        if ev.ev_type == EV_SYN and ev.ev_code == SYN_MT_REPORT:
            raise ProtocolAError(
                "multi-touch protocol A (SYN_MT_REPORT) unsupported; record with a protocol-B device"
            )
        if ev.ev_type == EV_SYN and ev.ev_code == SYN_REPORT:
            self._commit_frame(ev.timestamp)
            return
        if ev.ev_type != EV_ABS or ev.ev_code not in _MT_CODES:
            self.unconsumed.append(ev)
            return
        if ev.ev_code == ABS_MT_SLOT:
            self.current_slot = ev.ev_value
            return
        if ev.ev_code == ABS_MT_TRACKING_ID:
            self._tracking_id(ev)
            return
        self._position_update(ev)

    def finish(self) -> tuple[list[TouchTrack], list[InputEvent]]:
        for slot_id in sorted(self.slots):
            self._finalize(self.slots[slot_id], up_time=None, truncated=True)
        self.slots.clear()
        self.tracks.sort(key=lambda t: (t.down_time, t.tracking_id))
        return self.tracks, self.unconsumed

    def open_slot_count(self) -> int:
        return sum(1 for s in self.slots.values() if not s.pending_close)

    def _tracking_id(self, ev: InputEvent) -> None:
        slot_id = self.current_slot
        if ev.ev_value >= 0:
            old = self.slots.get(slot_id)
            if old is not None and not old.pending_close:
                # new contact replacing an unclosed one: close the old at its
                # last committed point
                self.warnings += 1
                logger.warning("slot %d reopened without close (id %d)", slot_id, ev.ev_value)
                self._finalize(old, up_time=None, truncated=False)
            self.slots[slot_id] = _Slot(tracking_id=ev.ev_value)
        else:
            slot = self.slots.get(slot_id)
            if slot is None or slot.pending_close:
                self.warnings += 1
                logger.warning("close for slot %d with no open contact", slot_id)
                return
            slot.pending_close = True

    def _position_update(self, ev: InputEvent) -> None:
        slot_id = self.current_slot
        slot = self.slots.get(slot_id)
        if slot is None or slot.pending_close:
            # salvage logs that lost the opening frame
            self.warnings += 1
            logger.warning("position update on closed slot %d; opening synthetic track", slot_id)
            slot = _Slot(tracking_id=-2 - slot_id, synthetic=True)
            self.slots[slot_id] = slot
        if ev.ev_code == ABS_MT_POSITION_X:
            slot.x = ev.ev_value
        elif ev.ev_code == ABS_MT_POSITION_Y:
            slot.y = ev.ev_value
        else:
            slot.pressure = ev.ev_value
        slot.dirty = True

    def _commit_frame(self, timestamp: int) -> None:
        closed = []
        for slot_id in sorted(self.slots):
            slot = self.slots[slot_id]
            if slot.dirty and slot.x is not None and slot.y is not None:
                slot.points.append(
                    TouchPoint(timestamp, slot.x, slot.y, slot.pressure, slot_id, slot.tracking_id)
                )
                slot.dirty = False
            if slot.pending_close:
                self._finalize(slot, up_time=timestamp, truncated=False)
                closed.append(slot_id)
        for slot_id in closed:
            del self.slots[slot_id]

    def _finalize(self, slot: _Slot, up_time: Optional[int], truncated: bool) -> None:
        if not slot.points:
            self.warnings += 1
            logger.warning("contact %d closed with no committed points; dropped", slot.tracking_id)
            return
        down = slot.points[0].timestamp
        up = up_time if up_time is not None else slot.points[-1].timestamp
        self.tracks.append(
            TouchTrack(tuple(slot.points), down, up, truncated=truncated, synthetic=slot.synthetic)
        )


def track_multitouch(events: Iterable[InputEvent]) -> tuple[list[TouchTrack], list[InputEvent]]:
    """Reconstruct per-finger tracks from one touch device's ordered events.

    Non-touch events come back in the second element untouched; contacts
    still open at end of input are emitted with truncated=True.
    """
    tracker = MultiTouchTracker()
    for ev in events:
        tracker.feed(ev)
    return tracker.finish()


def extract_key_events(events: Iterable[InputEvent]) -> list[KeyPress]:
    """Pair EV_KEY down/up events into presses.

    Auto-repeat (value 2) extends the open press; a down left hanging at end
    of input closes at the final event timestamp with truncated=True; an up
    with no matching down is dropped with a warning.
    """
    open_presses: dict[int, int] = {}
    presses: list[KeyPress] = []
    last_ts = 0
    for ev in events:
        last_ts = max(last_ts, ev.timestamp)
        if ev.ev_type != EV_KEY:
            continue
        code = ev.ev_code
        if ev.ev_value == KEY_DOWN:
            if code in open_presses:
                logger.warning("key %d pressed twice without release", code)
                continue
            open_presses[code] = ev.timestamp
        elif ev.ev_value == KEY_UP:
            down = open_presses.pop(code, None)
            if down is None:
                logger.warning("key %d released without press; dropped", code)
                continue
            presses.append(KeyPress(code, down, ev.timestamp, KEY_NAMES.get(code)))
        # KEY_REPEAT keeps the press open; nothing to record
    for code, down in open_presses.items():
        presses.append(KeyPress(code, down, last_ts, KEY_NAMES.get(code), truncated=True))
    presses.sort(key=lambda p: (p.down_time, p.key_code))
    return presses


def shift_epoch(events: Iterable[InputEvent], epoch: int) -> list[InputEvent]:
    """Rebase timestamps so that `epoch` becomes zero."""
    if epoch == 0:
        return list(events)
    return [replace(ev, timestamp=ev.timestamp - epoch) for ev in events]
