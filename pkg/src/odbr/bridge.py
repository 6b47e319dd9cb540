"""Device bridges: the host-side channel to a real device or a canned scenario.

A bridge exposes the handful of operations a recording session needs: stream
input events, dump the UI hierarchy, grab the screen, poll sensors, inject
events back, and answer basic device questions.  AdbBridge shells out to the
platform debug bridge binary; FixtureBridge replays a scenario directory so
the full pipeline runs with no device attached.
"""

from __future__ import annotations

import json
import logging
import re
import shlex
import subprocess
import threading
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Callable, Iterator, Optional

from .events import InputEvent, parse_getevent_line, parse_getevent_log
from .hierarchy import AxisRanges
from .sensors import SensorSample, parse_sensor_lines

logger = logging.getLogger(__name__)

DEFAULT_DEADLINE_S = 10.0


class BridgeError(Exception):
    """A bridge operation failed or timed out."""


class DeviceBridge(ABC):
    """Operations a session needs from a device; all calls must return or raise."""

    deadline_s: float = DEFAULT_DEADLINE_S

    @abstractmethod
    def run_shell(self, command: str) -> str: ...

    @abstractmethod
    def stream_input_events(self) -> Iterator[InputEvent]:
        """Yield events until the stream ends or stop_streaming() is called."""

    @abstractmethod
    def stop_streaming(self) -> None: ...

    @abstractmethod
    def dump_hierarchy(self) -> str: ...

    @abstractmethod
    def screencap(self) -> bytes: ...

    @abstractmethod
    def poll_sensors(self) -> Iterator[tuple[str, SensorSample]]: ...

    @abstractmethod
    def inject_event(self, device_index: int, ev_type: int, ev_code: int, ev_value: int) -> None: ...

    @abstractmethod
    def list_packages(self) -> list[str]: ...

    @abstractmethod
    def device_info(self) -> dict: ...

    def close(self) -> None:
        pass


class FixtureBridge(DeviceBridge):
    """Deterministic bridge driven by a scenario directory.

    Layout: `events.getevent` (getevent text), `dumps/NNN.xml`,
    `screens/NNN.png`, `sensors.txt`, `device.json`.  Events are emitted
    instantly; the k-th dump/screenshot request returns the k-th canned file
    (of which there should be one per expected action), clamped to the last.
    """

    def __init__(self, scenario_dir: str | Path):
        self.scenario_dir = Path(scenario_dir)
        if not self.scenario_dir.is_dir():
            raise BridgeError(f"scenario directory not found: {self.scenario_dir}")
        try:
            meta = json.loads((self.scenario_dir / "device.json").read_text())
        except FileNotFoundError as exc:
            raise BridgeError(f"scenario has no device.json: {self.scenario_dir}") from exc
        self._meta = meta
        self.epoch_us: int = int(meta.get("epoch_us", 0))
        self.created_at: Optional[str] = meta.get("created_at")
        self._dumps = sorted((self.scenario_dir / "dumps").glob("*.xml"))
        self._screens = sorted((self.scenario_dir / "screens").glob("*.png"))
        self._dump_calls = 0
        self._screen_calls = 0
        self._sensors_served = False
        self._stopped = threading.Event()
        self._lock = threading.Lock()
        self.injected: list[tuple[int, int, int, int]] = []
        # per-operation failure injection for degradation tests:
        # {"screencap": n} makes the n-th screencap call (0-based) raise
        self.fail_on: dict[str, int] = {}

    def _events_text(self) -> str:
        path = self.scenario_dir / "events.getevent"
        return path.read_text() if path.exists() else ""

    def run_shell(self, command: str) -> str:
        if command.startswith("getevent"):
            return self._events_text()
        raise BridgeError(f"fixture bridge does not emulate shell command {command!r}")

    def stream_input_events(self) -> Iterator[InputEvent]:
        for event in parse_getevent_log(self._events_text()).events:
            if self._stopped.is_set():
                return
            yield event

    def stop_streaming(self) -> None:
        self._stopped.set()

    def _maybe_fail(self, op: str, call_index: int) -> None:
        if self.fail_on.get(op) == call_index:
            raise BridgeError(f"injected {op} failure on call {call_index}")

    def dump_hierarchy(self) -> str:
        with self._lock:
            index = self._dump_calls
            self._dump_calls += 1
        self._maybe_fail("dump_hierarchy", index)
        if not self._dumps:
            raise BridgeError("scenario has no dumps/")
        return self._dumps[min(index, len(self._dumps) - 1)].read_text()

    def screencap(self) -> bytes:
        with self._lock:
            index = self._screen_calls
            self._screen_calls += 1
        self._maybe_fail("screencap", index)
        if not self._screens:
            raise BridgeError("scenario has no screens/")
        return self._screens[min(index, len(self._screens) - 1)].read_bytes()

    def poll_sensors(self) -> Iterator[tuple[str, SensorSample]]:
        # the orchestrator polls in a loop; serve the canned stream once so
        # stale samples are not re-admitted and counted as out of order
        with self._lock:
            if self._sensors_served:
                return
            self._sensors_served = True
        path = self.scenario_dir / "sensors.txt"
        if not path.exists():
            return
        yield from parse_sensor_lines(path.read_text())

    def inject_event(self, device_index: int, ev_type: int, ev_code: int, ev_value: int) -> None:
        self._maybe_fail("inject_event", len(self.injected))
        self.injected.append((device_index, ev_type, ev_code, ev_value))

    def list_packages(self) -> list[str]:
        return list(self._meta.get("packages", []))

    def device_info(self) -> dict:
        return {
            "model": self._meta.get("model", "fixture"),
            "os_version": self._meta.get("os_version", "unknown"),
            "screen_width": int(self._meta["screen_width"]),
            "screen_height": int(self._meta["screen_height"]),
            "axis_ranges": dict(self._meta["axis_ranges"]),
        }

    def axis_ranges(self) -> AxisRanges:
        r = self._meta["axis_ranges"]
        return AxisRanges(
            r["x_min"],
            r["x_max"],
            r["y_min"],
            r["y_max"],
            int(self._meta["screen_width"]),
            int(self._meta["screen_height"]),
        )


# subprocess runner signature: (argv, timeout_s, binary_output) -> stdout
Runner = Callable[[list[str], float, bool], "bytes | str"]


def _default_runner(argv: list[str], timeout: float, binary: bool):
    try:
        proc = subprocess.run(
            argv,
            capture_output=True,
            timeout=timeout,
            check=False,
        )
    except FileNotFoundError as exc:
        raise BridgeError(f"cannot run {argv[0]!r}: {exc}") from exc
    except subprocess.TimeoutExpired as exc:
        raise BridgeError(f"{' '.join(argv)} timed out after {timeout}s") from exc
    if proc.returncode != 0:
        raise BridgeError(
            f"{' '.join(argv)} failed ({proc.returncode}): {proc.stderr.decode(errors='replace')}"
        )
    return proc.stdout if binary else proc.stdout.decode(errors="replace")


_WM_SIZE_RE = re.compile(r"Physical size:\s*(\d+)x(\d+)")
_ABS_RANGE_RE = re.compile(
    r"(0035|0036)\s*:\s*value \d+, min (-?\d+), max (-?\d+)"
)
_SENSOR_LINE_RE = re.compile(
    r"^\s*(accelerometer|gps)\s*:\s*\(([-0-9., ]+)\)", re.IGNORECASE | re.MULTILINE
)


class AdbBridge(DeviceBridge):
    """Bridge over the `adb` binary; every operation is one or two shell calls."""

    def __init__(
        self,
        serial: Optional[str] = None,
        adb_path: str = "adb",
        deadline_s: float = DEFAULT_DEADLINE_S,
        runner: Optional[Runner] = None,
    ):
        self.serial = serial
        self.adb_path = adb_path
        self.deadline_s = deadline_s
        self._runner: Runner = runner or _default_runner
        self._stream_proc: Optional[subprocess.Popen] = None
        self._stopped = threading.Event()

    def _argv(self, *args: str) -> list[str]:
        base = [self.adb_path]
        if self.serial:
            base += ["-s", self.serial]
        return base + list(args)

    def run_shell(self, command: str) -> str:
        return self._runner(self._argv("shell", *shlex.split(command)), self.deadline_s, False)

    def stream_input_events(self) -> Iterator[InputEvent]:
        # long-running stream: bypass the runner and manage the process directly
        argv = self._argv("shell", "getevent", "-t")
        try:
            self._stream_proc = subprocess.Popen(
                argv, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, text=True
            )
        except FileNotFoundError as exc:
            raise BridgeError(f"cannot run {argv[0]!r}: {exc}") from exc
        assert self._stream_proc.stdout is not None
        prev_ts = 0
        for line_no, line in enumerate(self._stream_proc.stdout, start=1):
            if self._stopped.is_set():
                break
            event = parse_getevent_line(line, line_no, fill_timestamp=prev_ts)
            if event is None:
                continue
            prev_ts = event.timestamp
            yield event

    def stop_streaming(self) -> None:
        self._stopped.set()
        if self._stream_proc is not None:
            self._stream_proc.terminate()

    def dump_hierarchy(self) -> str:
        self.run_shell("uiautomator dump /sdcard/window_dump.xml")
        return self.run_shell("cat /sdcard/window_dump.xml")

    def screencap(self) -> bytes:
        raw = self._runner(self._argv("shell", "screencap", "-p"), self.deadline_s, True)
        # adb shell mangles LF into CRLF on older devices
        return raw.replace(b"\r\n", b"\n")

    def poll_sensors(self) -> Iterator[tuple[str, SensorSample]]:
        """Single-shot poll; the orchestrator calls this repeatedly.

        Best effort: parses `dumpsys sensorservice` lines of the form
        `accelerometer: (x, y, z) @<t_usec>`; devices that print a different
        shape simply produce no samples.
        """
        try:
            out = self.run_shell("dumpsys sensorservice")
        except BridgeError:
            return
        for m in _SENSOR_LINE_RE.finditer(out):
            kind = m.group(1).lower()
            try:
                values = tuple(float(v) for v in m.group(2).split(","))
            except ValueError:
                continue
            tail = out[m.end() : m.end() + 32]
            t_match = re.match(r"\s*@(\d+)", tail)
            timestamp = int(t_match.group(1)) if t_match else 0
            yield kind, SensorSample(timestamp, values)

    def inject_event(self, device_index: int, ev_type: int, ev_code: int, ev_value: int) -> None:
        self.run_shell(
            f"sendevent /dev/input/event{device_index} {ev_type} {ev_code} {ev_value}"
        )

    def list_packages(self) -> list[str]:
        out = self.run_shell("pm list packages")
        return [line.split(":", 1)[1].strip() for line in out.splitlines() if ":" in line]

    def device_info(self) -> dict:
        model = self.run_shell("getprop ro.product.model").strip()
        os_version = self.run_shell("getprop ro.build.version.release").strip()
        size = _WM_SIZE_RE.search(self.run_shell("wm size"))
        if size is None:
            raise BridgeError("cannot determine screen size from `wm size`")
        width, height = int(size.group(1)), int(size.group(2))
        ranges = {"x_min": 0, "x_max": width - 1, "y_min": 0, "y_max": height - 1}
        for code, lo, hi in _ABS_RANGE_RE.findall(self.run_shell("getevent -p")):
            axis = "x" if code == "0035" else "y"
            ranges[f"{axis}_min"], ranges[f"{axis}_max"] = int(lo), int(hi)
        return {
            "model": model,
            "os_version": os_version,
            "screen_width": width,
            "screen_height": height,
            "axis_ranges": ranges,
        }

    def close(self) -> None:
        self.stop_streaming()


def open_bridge(selector: str, deadline_s: float = DEFAULT_DEADLINE_S) -> DeviceBridge:
    """Build a bridge from a selector: `real`, `real:<serial>`, `fixture:<dir>`."""
    if selector == "real":
        return AdbBridge(deadline_s=deadline_s)
    if selector.startswith("real:"):
        return AdbBridge(serial=selector.split(":", 1)[1], deadline_s=deadline_s)
    if selector.startswith("fixture:"):
        return FixtureBridge(selector.split(":", 1)[1])
    raise ValueError(f"unknown bridge selector {selector!r}; use real, real:<serial>, fixture:<dir>")
