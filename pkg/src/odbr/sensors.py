"""Sensor traces: rate-limited accumulation of sampled device sensor streams.

Each trace owns one sensor kind and applies an admission floor so continuous
streams (accelerometer at device rate, GPS fixes) stay small enough to travel
inside a report.  Traces are written by one thread each and frozen afterwards.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

logger = logging.getLogger(__name__)

ACCELEROMETER = "accelerometer"
GPS = "gps"

# admission floors in milliseconds; kinds not listed default to the
# accelerometer's floor
DEFAULT_FLOORS_MS = {ACCELEROMETER: 50, GPS: 1000}

_DEFAULT_UNITS = {ACCELEROMETER: "m/s^2", GPS: "deg"}

# fixed arities; GPS fixes may carry altitude
_ARITY = {ACCELEROMETER: (3,), GPS: (2, 3)}


class SensorArityError(ValueError):
    """Sample value count does not match the sensor kind's arity."""


def default_floor_ms(kind: str) -> int:
    return DEFAULT_FLOORS_MS.get(kind, DEFAULT_FLOORS_MS[ACCELEROMETER])


def default_unit(kind: str) -> str:
    return _DEFAULT_UNITS.get(kind, "")


@dataclass(frozen=True)
class SensorSample:
    timestamp: int
    values: tuple[float, ...]


@dataclass
class SensorTrace:
    kind: str
    unit: str = ""
    min_interval_ms: int = 0
    samples: list[SensorSample] = field(default_factory=list)
    out_of_order: int = 0
    below_floor: int = 0

    def __post_init__(self):
        if not self.unit:
            self.unit = default_unit(self.kind)
        if self.min_interval_ms <= 0:
            self.min_interval_ms = default_floor_ms(self.kind)

    def _check_arity(self, sample: SensorSample) -> None:
        allowed = _ARITY.get(self.kind)
        if allowed is not None:
            if len(sample.values) not in allowed:
                raise SensorArityError(
                    f"{self.kind} sample carries {len(sample.values)} values,"
                    f" expected {' or '.join(map(str, allowed))}"
                )
        elif self.samples and len(sample.values) != len(self.samples[0].values):
            raise SensorArityError(
                f"{self.kind} sample arity changed mid-stream:"
                f" {len(sample.values)} != {len(self.samples[0].values)}"
            )

    def admit(self, sample: SensorSample) -> bool:
        """Append iff the floor gap holds; returns whether the sample was kept."""
        if sample.timestamp < 0:
            raise ValueError("sample timestamp must be non-negative")
        self._check_arity(sample)
        if not self.samples:
            self.samples.append(sample)
            return True
        last = self.samples[-1].timestamp
        if sample.timestamp < last:
            self.out_of_order += 1
            logger.warning(
                "%s sample at %dus arrived after %dus; discarded", self.kind, sample.timestamp, last
            )
            return False
        if sample.timestamp - last < self.min_interval_ms * 1000 or sample.timestamp == last:
            self.below_floor += 1
            return False
        self.samples.append(sample)
        return True


def admit_sample(trace: SensorTrace, sample: SensorSample) -> SensorTrace:
    trace.admit(sample)
    return trace


def summarize_trace(trace: SensorTrace) -> dict:
    """Count, time span, and per-axis min/max/mean; empty traces report count only."""
    if not trace.samples:
        return {"count": 0}
    arity = len(trace.samples[0].values)
    axes = []
    for i in range(arity):
        series = [s.values[i] for s in trace.samples]
        axes.append({"min": min(series), "max": max(series), "mean": sum(series) / len(series)})
    return {
        "count": len(trace.samples),
        "t_span_us": trace.samples[-1].timestamp - trace.samples[0].timestamp,
        "axes": axes,
    }


def parse_sensor_line(line: str, line_no: int = 0) -> tuple[str, SensorSample]:
    """Parse one `<kind> <t_usec> <v1> [v2 v3]...` fixture line."""
    parts = line.split()
    if len(parts) < 3:
        raise ValueError(f"sensor line {line_no}: expected kind, timestamp, values: {line!r}")
    kind = parts[0].lower()
    try:
        timestamp = int(parts[1])
        values = tuple(float(v) for v in parts[2:])
    except ValueError as exc:
        raise ValueError(f"sensor line {line_no}: {exc}") from exc
    return kind, SensorSample(timestamp, values)


def parse_sensor_lines(text: str) -> list[tuple[str, SensorSample]]:
    """Parse a fixture stream in order; blank lines and `#` comments skipped."""
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        bare = line.split("#", 1)[0].strip()
        if not bare:
            continue
        out.append(parse_sensor_line(bare, line_no))
    return out


def build_traces(
    samples: list[tuple[str, SensorSample]],
    floors_ms: Optional[dict[str, int]] = None,
) -> dict[str, SensorTrace]:
    """Feed an ordered mixed-kind stream through per-kind admission."""
    traces: dict[str, SensorTrace] = {}
    for kind, sample in samples:
        trace = traces.get(kind)
        if trace is None:
            floor = (floors_ms or {}).get(kind, default_floor_ms(kind))
            trace = SensorTrace(kind, min_interval_ms=floor)
            traces[kind] = trace
        trace.admit(sample)
    return traces
