import itertools
import re
from pathlib import Path

import pytest

from odbr.bridge import FixtureBridge
from odbr.capture import SessionConfig, analyze_events, start_session
from odbr.report import Annotations, assemble_report

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_counter = itertools.count()


def run_scenario(scenario: str, capture_dir: Path):
    """Full fixture session: stream, capture pairs, sensors, offline analysis."""
    bridge = FixtureBridge(FIXTURES / scenario)
    config = SessionConfig(app_package="com.example.demo", capture_dir=capture_dir)
    handle = start_session(config, bridge=bridge)
    assert handle.wait_stream_end(timeout=10)
    capture = handle.stop()
    interactions = analyze_events(capture.events, capture.axis_ranges(), capture.thresholds)
    return capture, interactions


@pytest.fixture
def fixture_pipeline(tmp_path):
    """Callable running scenario → (capture, interactions, report, assets)."""

    def run(scenario: str, annotations: Annotations = None):
        capture_dir = tmp_path / f"cap-{next(_counter)}"
        capture, interactions = run_scenario(scenario, capture_dir)
        report, assets = assemble_report(capture, interactions, annotations=annotations)
        return capture, interactions, report, assets

    return run


# one pass/fail line per acceptance criterion, printed after the run
_criterion_results: list[tuple[int, str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    m = re.match(r"test_criterion_(\d+)_(\w+)", item.name)
    if m:
        _criterion_results.append((int(m.group(1)), m.group(2), report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, outcome in sorted(_criterion_results):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {name}")
