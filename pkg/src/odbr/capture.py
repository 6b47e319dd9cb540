"""Recording sessions: stream events, fire per-action captures, poll sensors.

The orchestrator runs one reader thread over the bridge's input-event stream,
a sensor poller, and an idle watchdog; screenshot/UI-dump pairs run on a small
worker pool so they never stall the event reader.  Everything funnels into a
RawCapture when the session stops.
"""

from __future__ import annotations

import datetime as _dt
import logging
import queue
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .bridge import BridgeError, DeviceBridge, open_bridge
from .events import (
    ABS_MT_SLOT,
    ABS_MT_TRACKING_ID,
    EV_ABS,
    EV_KEY,
    KEY_DOWN,
    InputEvent,
    KeyPress,
    TouchTrack,
    extract_key_events,
    is_hardware_key,
    track_multitouch,
)
from .gestures import GestureThresholds, UserInteraction, build_interactions, map_track_to_screen
from .hierarchy import AxisRanges
from .replay import SLEEP_FLOOR_US, ReplayTiming, PRESERVE
from .sensors import SensorSample, SensorTrace, default_floor_ms

logger = logging.getLogger(__name__)


class PackageMissingError(BridgeError):
    """The configured app package is not installed on the device."""


@dataclass
class SessionConfig:
    app_package: str = ""
    thresholds: GestureThresholds = field(default_factory=GestureThresholds)
    sensor_floors_ms: dict[str, int] = field(default_factory=dict)
    capture_dir: Optional[Path] = None
    bridge: str = "real"  # selector used when no bridge instance is supplied
    deadline_s: float = 10.0
    unattended: bool = True  # auto-answer idle prompts with "continue"


@dataclass
class _Pair:
    """One scheduled screenshot+dump capture."""

    trigger_timestamp: int
    fired_mono_ns: int
    screenshot_path: Optional[str] = None
    dump_xml: Optional[str] = None
    latency_us: int = 0
    screenshot_error: Optional[str] = None
    dump_error: Optional[str] = None


@dataclass
class RawCapture:
    events: list[InputEvent]
    ui_dumps: list[tuple[int, Optional[str]]]
    screenshots: list[tuple[int, Optional[str]]]
    capture_latencies_us: list[int]
    sensor_traces: dict[str, SensorTrace]
    device_info: dict
    session_epoch: int
    app_package: str
    thresholds: GestureThresholds
    created_at: str
    idle_prompts: list[dict] = field(default_factory=list)

    def axis_ranges(self) -> AxisRanges:
        r = self.device_info["axis_ranges"]
        return AxisRanges(
            r["x_min"],
            r["x_max"],
            r["y_min"],
            r["y_max"],
            self.device_info["screen_width"],
            self.device_info["screen_height"],
        )


class NewActionDetector:
    """Incremental new-action detection over the live event stream.

    Fires when a contact opens while no contact is open, or on a hardware
    key-down.  Touch-chatter buttons (BTN_*, codes >= 0x100) never fire.  A
    second finger joining an open gesture never fires, which matches offline
    segmentation whenever the fingers overlap by at least the configured
    multi-touch window (fixture scenarios keep overlaps unambiguous).
    """

    def __init__(self):
        self._open_contacts: set[tuple[int, int]] = set()
        self._current_slot: dict[int, int] = {}

    def feed(self, ev: InputEvent) -> Optional[int]:
        if ev.ev_type == EV_KEY:
            if ev.ev_value == KEY_DOWN and is_hardware_key(ev.ev_code):
                return ev.timestamp
            return None
        if ev.ev_type != EV_ABS:
            return None
        if ev.ev_code == ABS_MT_SLOT:
            self._current_slot[ev.device_index] = ev.ev_value
            return None
        if ev.ev_code != ABS_MT_TRACKING_ID:
            return None
        slot = (ev.device_index, self._current_slot.get(ev.device_index, 0))
        if ev.ev_value < 0:
            self._open_contacts.discard(slot)
            return None
        fire = not self._open_contacts
        self._open_contacts.add(slot)
        return ev.timestamp if fire else None


def _call_with_deadline(fn, deadline_s: float, what: str):
    """Run a bridge call on a side thread so a hung bridge cannot stall us."""
    result: queue.Queue = queue.Queue(maxsize=1)

    def run():
        try:
            result.put((True, fn()))
        except Exception as exc:  # noqa: BLE001 - transported to caller
            result.put((False, exc))

    threading.Thread(target=run, daemon=True, name=f"bridge-{what}").start()
    try:
        ok, value = result.get(timeout=deadline_s)
    except queue.Empty:
        raise BridgeError(f"{what} did not respond within {deadline_s}s") from None
    if not ok:
        raise value
    return value


class SessionHandle:
    def __init__(self, config: SessionConfig, bridge: DeviceBridge, owns_bridge: bool):
        self.config = config
        self.bridge = bridge
        self._owns_bridge = owns_bridge
        self.device_info = _call_with_deadline(
            bridge.device_info, config.deadline_s, "device_info"
        )
        if config.app_package:
            packages = _call_with_deadline(
                bridge.list_packages, config.deadline_s, "list_packages"
            )
            if config.app_package not in packages:
                raise PackageMissingError(
                    f"package {config.app_package!r} is not installed on the device"
                )
        self.capture_dir = Path(config.capture_dir or tempfile.mkdtemp(prefix="odbr-capture-"))
        try:
            self.capture_dir.mkdir(parents=True, exist_ok=True)
            probe = self.capture_dir / ".writable"
            probe.write_bytes(b"")
            probe.unlink()
        except OSError as exc:
            raise BridgeError(f"capture_dir {self.capture_dir} not writable: {exc}") from exc

        self.session_epoch: int = getattr(bridge, "epoch_us", None) or 0
        self._epoch_from_first_event = getattr(bridge, "epoch_us", None) is None
        self.created_at: str = getattr(bridge, "created_at", None) or (
            _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        )

        self._events: list[InputEvent] = []
        self._pairs: list[_Pair] = []
        self._lock = threading.Lock()
        self._detector = NewActionDetector()
        self._traces: dict[str, SensorTrace] = {}
        self._stop_requested = threading.Event()
        self._stream_done = threading.Event()
        self._last_activity_mono = time.monotonic()
        self.session_events: queue.Queue = queue.Queue()
        self.idle_prompts: list[dict] = []
        self._prompt_armed = True

        # one worker per capture kind: keeps the bridge calls of each kind in
        # firing order (the device serializes them anyway) while screenshot
        # and dump for the same action still run side by side
        self._shot_executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix="shots")
        self._dump_executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix="dumps")
        self._pair_futures: list = []
        self._reader = threading.Thread(target=self._read_events, name="event-reader")
        self._sensor_poller = threading.Thread(target=self._poll_sensors, name="sensor-poller")
        self._watchdog = threading.Thread(target=self._watch_idle, name="idle-watchdog", daemon=True)
        self._reader.start()
        self._sensor_poller.start()
        self._watchdog.start()

    # -- threads ------------------------------------------------------------

    def _read_events(self):
        try:
            for raw in self.bridge.stream_input_events():
                if self._epoch_from_first_event:
                    self.session_epoch = raw.timestamp
                    self._epoch_from_first_event = False
                ev = (
                    replace(raw, timestamp=raw.timestamp - self.session_epoch)
                    if self.session_epoch
                    else raw
                )
                with self._lock:
                    self._events.append(ev)
                self._last_activity_mono = time.monotonic()
                self._prompt_armed = True
                trigger = self._detector.feed(ev)
                if trigger is not None:
                    self._schedule_pair(trigger)
                if self._stop_requested.is_set():
                    break
        except BridgeError as exc:
            logger.error("event stream failed: %s", exc)
        finally:
            self._stream_done.set()

    def _schedule_pair(self, trigger: int):
        pair = _Pair(trigger_timestamp=trigger, fired_mono_ns=time.monotonic_ns())
        with self._lock:
            index = len(self._pairs)
            self._pairs.append(pair)
        self._pair_futures.append(self._shot_executor.submit(self._capture_screenshot, pair, index))
        self._pair_futures.append(self._dump_executor.submit(self._capture_dump, pair))

    def _capture_screenshot(self, pair: _Pair, index: int):
        try:
            png = self.bridge.screencap()
            path = self.capture_dir / f"screen-{index:03d}.png"
            path.write_bytes(png)
            pair.screenshot_path = str(path)
        except (BridgeError, OSError) as exc:
            pair.screenshot_error = str(exc)
            logger.warning("screenshot capture gap at t=%dus: %s", pair.trigger_timestamp, exc)
        finally:
            pair.latency_us = max(
                pair.latency_us, (time.monotonic_ns() - pair.fired_mono_ns) // 1000
            )

    def _capture_dump(self, pair: _Pair):
        try:
            pair.dump_xml = self.bridge.dump_hierarchy()
        except BridgeError as exc:
            pair.dump_error = str(exc)
            logger.warning("ui-dump capture gap at t=%dus: %s", pair.trigger_timestamp, exc)
        finally:
            pair.latency_us = max(
                pair.latency_us, (time.monotonic_ns() - pair.fired_mono_ns) // 1000
            )

    def _poll_sensors(self):
        floors = self.config.sensor_floors_ms
        while True:
            try:
                for kind, sample in self.bridge.poll_sensors():
                    trace = self._traces.get(kind)
                    if trace is None:
                        floor = floors.get(kind, default_floor_ms(kind))
                        trace = SensorTrace(kind, min_interval_ms=floor)
                        self._traces[kind] = trace
                    trace.admit(sample)
            except BridgeError as exc:
                logger.warning("sensor poll failed: %s", exc)
            if self._stop_requested.wait(timeout=0.05):
                return

    def _watch_idle(self):
        timeout_s = self.config.thresholds.idle_timeout_ms / 1000
        while not self._stop_requested.wait(timeout=0.05):
            idle_for = time.monotonic() - self._last_activity_mono
            if idle_for >= timeout_s and self._prompt_armed:
                self._prompt_armed = False  # one prompt per quiet period
                prompt = {"idle_s": round(idle_for, 3), "answer": None}
                self.idle_prompts.append(prompt)
                if self.config.unattended:
                    prompt["answer"] = "continue"
                else:
                    self.session_events.put(("idle", idle_for))

    def answer_idle(self, finish: bool):
        for prompt in reversed(self.idle_prompts):
            if prompt["answer"] is None:
                prompt["answer"] = "finish" if finish else "continue"
                break

    # -- lifecycle ----------------------------------------------------------

    def stop(self, finished: bool = True) -> Optional[RawCapture]:
        """Drain everything and assemble the RawCapture; finished=False resumes."""
        if not finished:
            self.answer_idle(finish=False)
            return None
        self._stop_requested.set()
        self.bridge.stop_streaming()
        self._reader.join(timeout=self.config.deadline_s)
        if self._reader.is_alive():
            logger.warning("event reader did not drain within the deadline")
        self._sensor_poller.join(timeout=self.config.deadline_s)
        self._shot_executor.shutdown(wait=True)
        self._dump_executor.shutdown(wait=True)
        if self._owns_bridge:
            self.bridge.close()
        with self._lock:
            pairs = list(self._pairs)
            events = list(self._events)
        return RawCapture(
            events=events,
            ui_dumps=[(p.trigger_timestamp, p.dump_xml) for p in pairs],
            screenshots=[(p.trigger_timestamp, p.screenshot_path) for p in pairs],
            capture_latencies_us=[p.latency_us for p in pairs],
            sensor_traces=dict(self._traces),
            device_info=self.device_info,
            session_epoch=self.session_epoch,
            app_package=self.config.app_package,
            thresholds=self.config.thresholds,
            created_at=self.created_at,
            idle_prompts=list(self.idle_prompts),
        )

    def wait_stream_end(self, timeout: Optional[float] = None) -> bool:
        """Block until the bridge's event stream is exhausted (fixture runs)."""
        return self._stream_done.wait(timeout=timeout)


def start_session(config: SessionConfig, bridge: Optional[DeviceBridge] = None) -> SessionHandle:
    owns = bridge is None
    if bridge is None:
        bridge = open_bridge(config.bridge, deadline_s=config.deadline_s)
    return SessionHandle(config, bridge, owns_bridge=owns)


# -- offline analysis ---------------------------------------------------------


def analyze_events(
    events: Sequence[InputEvent],
    axis_ranges: AxisRanges,
    thresholds: GestureThresholds,
) -> list[UserInteraction]:
    """Offline pipeline: events → tracks/keys → screen space → interactions."""
    by_device: dict[int, list[InputEvent]] = {}
    for ev in events:
        by_device.setdefault(ev.device_index, []).append(ev)

    tracks: list[TouchTrack] = []
    leftovers: list[InputEvent] = []
    mt_codes = {ABS_MT_SLOT, ABS_MT_TRACKING_ID, 0x35, 0x36, 0x3A}
    for dev_events in by_device.values():
        if any(e.ev_type == EV_ABS and e.ev_code in mt_codes for e in dev_events):
            dev_tracks, unconsumed = track_multitouch(dev_events)
            tracks.extend(dev_tracks)
            leftovers.extend(unconsumed)
        else:
            leftovers.extend(dev_events)
    tracks.sort(key=lambda t: (t.down_time, t.tracking_id))
    leftovers.sort(key=lambda e: e.timestamp)

    keys: list[KeyPress] = [
        k for k in extract_key_events(leftovers) if is_hardware_key(k.key_code)
    ]
    screen_tracks = [map_track_to_screen(t, axis_ranges) for t in tracks]
    return build_interactions(screen_tracks, keys, thresholds)


# -- replay -------------------------------------------------------------------


@dataclass(frozen=True)
class ReplayOutcome:
    injected_count: int
    duration_us: int


class ReplayError(BridgeError):
    """Injection failed; failed_index is the 1-based ordinal of the bad event."""

    def __init__(self, message: str, failed_index: int, injected_count: int):
        super().__init__(message)
        self.failed_index = failed_index
        self.injected_count = injected_count


def replay_capture(
    bridge: DeviceBridge,
    events: Sequence[InputEvent],
    timing: ReplayTiming = PRESERVE,
) -> ReplayOutcome:
    """Inject the event log back through the bridge with the requested pacing.

    Preserve mode sleeps recorded gaps, merging anything below the 10ms sleep
    floor into the next gap.
    """
    start_ns = time.monotonic_ns()
    pending = 0
    for i, ev in enumerate(events):
        if i > 0:
            if timing.mode == "preserve":
                pending += ev.timestamp - events[i - 1].timestamp
                if pending >= SLEEP_FLOOR_US:
                    time.sleep(pending / 1_000_000)
                    pending = 0
            elif timing.mode == "fixed_gap" and timing.gap_ms > 0:
                time.sleep(timing.gap_ms / 1000)
        try:
            bridge.inject_event(ev.device_index, ev.ev_type, ev.ev_code, ev.ev_value)
        except BridgeError as exc:
            raise ReplayError(
                f"injection failed at event {i + 1} of {len(events)}: {exc}",
                failed_index=i + 1,
                injected_count=i,
            ) from exc
    return ReplayOutcome(
        injected_count=len(events), duration_us=(time.monotonic_ns() - start_ns) // 1000
    )
