"""Command line interface: pipeline commands, exit codes, JSON output."""

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from odbr.cli import main
from odbr.report import Annotations, assemble_report
from odbr.bundle import write_bundle
from odbr.service import create_app

from conftest import FIXTURES, run_scenario


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def bundle_dir(tmp_path_factory):
    """A three-action bundle built once for replay/submit commands."""
    tmp = tmp_path_factory.mktemp("cli-bundle")
    capture, interactions = run_scenario("three-action", tmp / "cap")
    report, assets = assemble_report(
        capture,
        interactions,
        annotations=Annotations(title="list scroll glitch"),
    )
    return write_bundle(report, assets, tmp / "bundle")


class TestParse:
    def test_summarizes_golden_log(self, runner):
        result = runner.invoke(main, ["parse", str(FIXTURES / "golden.getevent")])
        assert result.exit_code == 0
        summary = json.loads(result.stdout)
        assert summary["counts"]["EV_SYN"] > 0
        assert summary["counts"]["EV_KEY"] > 0
        assert summary["counts"]["EV_ABS"] > 0
        assert summary["events"] == sum(summary["counts"].values())
        assert "/dev/input/event2" in summary["devices"]

    def test_empty_log_is_a_zero_summary(self, runner, tmp_path):
        empty = tmp_path / "empty.log"
        empty.write_text("")
        result = runner.invoke(main, ["parse", str(empty)])
        assert result.exit_code == 0
        summary = json.loads(result.stdout)
        assert summary == {"events": 0, "counts": {}, "devices": [], "metadata_lines": 0}

    def test_malformed_line_is_a_validation_error(self, runner, tmp_path):
        bad = tmp_path / "bad.log"
        bad.write_text("/dev/input/event2: zz zz zz\n")
        result = runner.invoke(main, ["parse", str(bad)])
        assert result.exit_code == 1
        assert "error:" in result.stderr

    def test_missing_file_fails(self, runner):
        result = runner.invoke(main, ["parse", "no-such.log"])
        assert result.exit_code != 0


class TestInfer:
    def test_single_tap_scenario(self, runner):
        result = runner.invoke(main, ["infer", str(FIXTURES / "single-tap")])
        assert result.exit_code == 0
        steps = json.loads(result.stdout)
        assert len(steps) == 1
        assert steps[0]["kind"] == "Tap"
        assert steps[0]["description"].startswith("Tap on ")
        assert steps[0]["target"]["class_name"] == "android.widget.Button"

    def test_missing_scenario_dir_fails(self, runner):
        result = runner.invoke(main, ["infer", "no-such-dir"])
        assert result.exit_code != 0

    def test_dir_without_fixture_layout_is_a_bridge_fault(self, runner, tmp_path):
        result = runner.invoke(main, ["infer", str(tmp_path)])
        assert result.exit_code == 2
        assert "error:" in result.stderr


class TestReportBuild:
    def test_writes_a_complete_bundle(self, runner, tmp_path):
        out = tmp_path / "bundle"
        result = runner.invoke(
            main,
            [
                "report", "build", str(FIXTURES / "three-action"),
                "--title", "crash after swipe",
                "--expected", "list scrolls",
                "--actual", "app exits",
                "-o", str(out),
            ],
        )
        assert result.exit_code == 0, result.stderr
        summary = json.loads(result.stdout)
        assert summary["steps"] == 3
        assert len(summary["id"]) == 16
        assert (out / "report.json").is_file()
        assert (out / "report.html").is_file()
        assert (out / "replay-sendevent.sh").is_file()
        assert (out / "replay-adb.sh").is_file()
        doc = json.loads((out / "report.json").read_text())
        assert doc["title"] == "crash after swipe"
        assert doc["id"] == summary["id"]

    def test_matches_orchestrator_end_to_end(self, runner, tmp_path):
        annotations = Annotations(
            title="crash after swipe",
            expected_behavior="list scrolls",
            actual_behavior="app exits",
        )
        capture, interactions = run_scenario("three-action", tmp_path / "cap")
        direct, assets = assemble_report(capture, interactions, annotations=annotations)
        direct_dir = write_bundle(direct, assets, tmp_path / "direct")

        out = tmp_path / "bundle"
        result = runner.invoke(
            main,
            [
                "report", "build", str(FIXTURES / "three-action"),
                "--title", "crash after swipe",
                "--expected", "list scrolls",
                "--actual", "app exits",
                "--app", "com.example.demo",
                "-o", str(out),
            ],
        )
        assert result.exit_code == 0
        assert (out / "report.json").read_text() == (direct_dir / "report.json").read_text()


class TestRecord:
    def test_unattended_fixture_session(self, runner, tmp_path):
        out = tmp_path / "rec"
        result = runner.invoke(
            main,
            ["record", "--app", "com.example.demo", "--out", str(out), "--title", "t"],
            env={"ODBR_BRIDGE": f"fixture:{FIXTURES / 'single-tap'}"},
        )
        assert result.exit_code == 0, result.stderr
        summary = json.loads(result.stdout)
        assert summary["steps"] == 1
        assert (out / "report.json").is_file()

    def test_unattended_requires_title(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["record", "--out", str(tmp_path / "rec")],
            env={"ODBR_BRIDGE": f"fixture:{FIXTURES / 'single-tap'}"},
        )
        assert result.exit_code == 1
        assert "--title is required" in result.stderr

    def test_unknown_package_is_a_bridge_fault(self, runner, tmp_path):
        result = runner.invoke(
            main,
            [
                "record", "--app", "com.nope", "--out", str(tmp_path / "rec"),
                "--title", "t",
            ],
            env={"ODBR_BRIDGE": f"fixture:{FIXTURES / 'single-tap'}"},
        )
        assert result.exit_code == 2


class TestReplayEmit:
    def test_adb_script_to_stdout(self, runner, bundle_dir):
        result = runner.invoke(main, ["replay", "emit", str(bundle_dir), "--flavor", "adb"])
        assert result.exit_code == 0
        assert "input tap 540 960" in result.stdout
        assert "input swipe 100 1200 800 1200 300" in result.stdout

    def test_sendevent_script_to_file(self, runner, bundle_dir, tmp_path):
        out = tmp_path / "replay.sh"
        result = runner.invoke(main, ["replay", "emit", str(bundle_dir), "-o", str(out)])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["flavor"] == "sendevent"
        assert out.read_text() == (bundle_dir / "replay-sendevent.sh").read_text()


class TestReplayRun:
    def test_injects_against_fixture_bridge(self, runner, bundle_dir):
        result = runner.invoke(
            main,
            ["replay", "run", str(bundle_dir), "--timing", "max_speed"],
            env={"ODBR_BRIDGE": f"fixture:{FIXTURES / 'three-action'}"},
        )
        assert result.exit_code == 0, result.stderr
        outcome = json.loads(result.stdout)
        assert outcome["injected_count"] == 38

    def test_bad_timing_mode_is_a_validation_error(self, runner, bundle_dir):
        result = runner.invoke(
            main,
            ["replay", "run", str(bundle_dir), "--timing", "warp"],
            env={"ODBR_BRIDGE": f"fixture:{FIXTURES / 'three-action'}"},
        )
        assert result.exit_code == 1
        assert "unknown timing mode" in result.stderr


class TestSubmit:
    def test_uploads_document_and_attachments(self, runner, bundle_dir, tmp_path, monkeypatch):
        app = create_app(tmp_path / "store")
        monkeypatch.setattr("odbr.cli.httpx.Client", lambda **kw: TestClient(app))
        result = runner.invoke(
            main, ["submit", str(bundle_dir), "--server", "http://svc"]
        )
        assert result.exit_code == 0, result.stderr
        summary = json.loads(result.stdout)
        assert summary["revision"] == 1
        client = TestClient(app)
        stored = client.get(f"/reports/{summary['id']}")
        assert stored.status_code == 200
        assert json.loads(stored.text) == json.loads((bundle_dir / "report.json").read_text())
        assert summary["attachments"] == len(list((bundle_dir / "attachments").iterdir()))
        shot = client.get(f"/reports/{summary['id']}/attachments/screenshot-000.png")
        assert shot.status_code == 200

    def test_connection_refused_is_an_io_fault(self, runner, bundle_dir):
        result = runner.invoke(
            main, ["submit", str(bundle_dir), "--server", "http://127.0.0.1:9"]
        )
        assert result.exit_code == 2
        assert "error:" in result.stderr

    def test_validation_rejection_maps_to_exit_one(self, runner, tmp_path, monkeypatch):
        broken = tmp_path / "broken"
        broken.mkdir()
        (broken / "report.json").write_text('{"schema_version": 1}')
        app = create_app(tmp_path / "store")
        monkeypatch.setattr("odbr.cli.httpx.Client", lambda **kw: TestClient(app))
        result = runner.invoke(main, ["submit", str(broken), "--server", "http://svc"])
        assert result.exit_code == 1
        assert "missing required field: title" in result.stderr


class TestServe:
    def test_help_lists_bind_options(self, runner):
        result = runner.invoke(main, ["serve", "--help"])
        assert result.exit_code == 0
        assert "--store-root" in result.stdout
        assert "8477" in result.stdout
