from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from odbr.sensors import (
    SensorArityError,
    SensorSample,
    SensorTrace,
    admit_sample,
    build_traces,
    parse_sensor_line,
    parse_sensor_lines,
    summarize_trace,
)


def accel(t, x=0.0, y=0.0, z=9.8):
    return SensorSample(t, (x, y, z))


class TestAdmission:
    def test_first_sample_always_admitted(self):
        trace = SensorTrace("accelerometer")
        assert trace.admit(accel(123)) is True
        assert len(trace.samples) == 1

    def test_floor_filters_middle_sample(self):
        trace = SensorTrace("accelerometer", min_interval_ms=50)
        for t in (0, 30_000, 60_000):
            trace.admit(accel(t))
        assert [s.timestamp for s in trace.samples] == [0, 60_000]
        assert trace.below_floor == 1

    def test_gap_exactly_floor_admitted(self):
        trace = SensorTrace("accelerometer", min_interval_ms=50)
        trace.admit(accel(0))
        assert trace.admit(accel(50_000)) is True

    def test_out_of_order_discarded_with_count(self):
        trace = SensorTrace("accelerometer", min_interval_ms=50)
        trace.admit(accel(100_000))
        assert trace.admit(accel(40_000)) is False
        assert trace.out_of_order == 1
        assert len(trace.samples) == 1

    def test_readmitting_last_sample_changes_nothing(self):
        trace = SensorTrace("accelerometer", min_interval_ms=50)
        trace.admit(accel(100_000))
        before = list(trace.samples)
        assert trace.admit(accel(100_000)) is False
        assert trace.samples == before
        assert trace.out_of_order == 0

    def test_wrong_arity_rejected(self):
        trace = SensorTrace("accelerometer")
        with pytest.raises(SensorArityError, match="2 values"):
            trace.admit(SensorSample(0, (1.0, 2.0)))

    def test_gps_allows_two_or_three_values(self):
        trace = SensorTrace("gps")
        assert trace.admit(SensorSample(0, (35.0, -78.9))) is True
        assert trace.admit(SensorSample(2_000_000, (35.0, -78.9, 120.0))) is True

    def test_other_kind_arity_fixed_by_first_sample(self):
        trace = SensorTrace("magnetometer")
        trace.admit(SensorSample(0, (1.0, 2.0, 3.0)))
        with pytest.raises(SensorArityError, match="mid-stream"):
            trace.admit(SensorSample(1_000_000, (1.0,)))

    def test_negative_timestamp_rejected(self):
        with pytest.raises(ValueError):
            SensorTrace("gps").admit(SensorSample(-1, (0.0, 0.0)))

    def test_default_floors(self):
        assert SensorTrace("accelerometer").min_interval_ms == 50
        assert SensorTrace("gps").min_interval_ms == 1000
        assert SensorTrace("magnetometer").min_interval_ms == 50

    def test_functional_wrapper_returns_trace(self):
        trace = SensorTrace("gps")
        assert admit_sample(trace, SensorSample(0, (1.0, 2.0))) is trace

    @given(st.lists(st.integers(0, 10_000_000), max_size=60))
    def test_floor_holds_for_every_adjacent_pair(self, stamps):
        trace = SensorTrace("accelerometer", min_interval_ms=50)
        for t in stamps:
            trace.admit(accel(t))
        kept = [s.timestamp for s in trace.samples]
        assert all(b - a >= 50_000 for a, b in zip(kept, kept[1:]))
        assert kept == sorted(set(kept))


class TestSummarize:
    def test_empty_trace(self):
        assert summarize_trace(SensorTrace("gps")) == {"count": 0}

    def test_constant_series_mean(self):
        trace = SensorTrace("accelerometer", min_interval_ms=50)
        trace.admit(accel(0))
        trace.admit(accel(60_000))
        got = summarize_trace(trace)
        assert got["count"] == 2
        assert got["t_span_us"] == 60_000
        assert got["axes"][2] == {"min": 9.8, "max": 9.8, "mean": 9.8}

    def test_integer_series_exact(self):
        trace = SensorTrace("accelerometer", min_interval_ms=50)
        for i, z in enumerate((1.0, 2.0, 3.0)):
            trace.admit(accel(i * 60_000, z=z))
        axis = summarize_trace(trace)["axes"][2]
        assert axis == {"min": 1.0, "max": 3.0, "mean": 2.0}

    def test_min_max_order_insensitive(self):
        rng = random.Random(0xE0)
        values = [float(rng.randrange(-50, 50)) for _ in range(20)]
        forward = SensorTrace("pressure", min_interval_ms=1)
        backward = SensorTrace("pressure", min_interval_ms=1)
        for i, v in enumerate(values):
            forward.admit(SensorSample(i * 2_000, (v,)))
        for i, v in enumerate(reversed(values)):
            backward.admit(SensorSample(i * 2_000, (v,)))
        f, b = summarize_trace(forward)["axes"][0], summarize_trace(backward)["axes"][0]
        assert (f["min"], f["max"]) == (b["min"], b["max"])


class TestFixtureFormat:
    def test_parse_line(self):
        kind, sample = parse_sensor_line("accelerometer 1000000 0.1 -0.2 9.8")
        assert kind == "accelerometer"
        assert sample == SensorSample(1_000_000, (0.1, -0.2, 9.8))

    def test_parse_line_errors(self):
        with pytest.raises(ValueError, match="line 3"):
            parse_sensor_line("accelerometer 1000000", line_no=3)
        with pytest.raises(ValueError, match="line 9"):
            parse_sensor_line("gps notatime 1 2", line_no=9)

    def test_parse_stream_with_comments(self):
        text = "# session sensors\ngps 0 35.1 -78.9\n\naccelerometer 1000 0 0 9.8\n"
        got = parse_sensor_lines(text)
        assert [k for k, _ in got] == ["gps", "accelerometer"]

    def test_build_traces_routes_by_kind(self):
        text = (
            "accelerometer 0 0 0 9.8\n"
            "gps 0 35.0 -78.9\n"
            "accelerometer 10000 0 0 9.7\n"  # below 50ms floor, dropped
            "accelerometer 60000 0 0 9.6\n"
        )
        traces = build_traces(parse_sensor_lines(text))
        assert set(traces) == {"accelerometer", "gps"}
        assert len(traces["accelerometer"].samples) == 2
        assert traces["accelerometer"].below_floor == 1
        assert len(traces["gps"].samples) == 1
