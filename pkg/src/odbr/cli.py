"""Command line front door.

Offline pipeline commands over getevent logs and fixture scenario
directories, live recording with idle prompts, replay emission and
execution, report submission, and the HTTP service launcher.

Machine output is JSON on standard output; diagnostics go to standard
error. Exit codes: 0 success, 1 validation problem, 2 bridge or IO fault.
"""

from __future__ import annotations

import functools
import json
import queue
import sys
import time
from pathlib import Path
from typing import Optional

import click
import httpx

from .bridge import BridgeError, open_bridge
from .bundle import build_replay_scripts, read_bundle, write_bundle
from .capture import SessionConfig, analyze_events, replay_capture, start_session
from .events import EV_ABS, EV_KEY, EV_SYN, parse_getevent_log
from .replay import parse_timing
from .report import (
    Annotations,
    ReportAssemblyError,
    ReportValidationError,
    assemble_report,
    guess_content_type,
    report_to_dict,
)
from .service import DEFAULT_PORT, create_app

_TYPE_NAMES = {EV_SYN: "EV_SYN", EV_KEY: "EV_KEY", EV_ABS: "EV_ABS"}


def _emit(payload) -> None:
    click.echo(json.dumps(payload, indent=2, ensure_ascii=False))


def _guarded(fn):
    """Map pipeline exceptions onto the exit code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ReportValidationError,) as exc:
            for violation in exc.violations:
                click.echo(f"error: {violation}", err=True)
            raise SystemExit(1)
        except (ReportAssemblyError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(1)
        except httpx.HTTPError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)
        except (BridgeError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)

    return wrapper


def _run_fixture_pipeline(
    scenario_dir: Path, annotations: Optional[Annotations], app_package: str = ""
):
    """Record the canned scenario end to end and assemble the report."""
    config = SessionConfig(app_package=app_package, bridge=f"fixture:{scenario_dir}")
    handle = start_session(config)
    handle.wait_stream_end(timeout=config.deadline_s)
    capture = handle.stop()
    interactions = analyze_events(capture.events, capture.axis_ranges(), capture.thresholds)
    return assemble_report(capture, interactions, annotations=annotations)


@click.group()
def main():
    """Record, rebuild, replay, and serve Android bug reports."""


@main.command()
@click.argument("log", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@_guarded
def parse(log: Path):
    """Summarize a getevent transcript: event counts per type, devices seen."""
    parsed = parse_getevent_log(log.read_text())
    counts: dict[str, int] = {}
    for ev in parsed.events:
        name = _TYPE_NAMES.get(ev.ev_type, f"0x{ev.ev_type:02x}")
        counts[name] = counts.get(name, 0) + 1
    devices = sorted({f"/dev/input/event{ev.device_index}" for ev in parsed.events})
    _emit(
        {
            "events": len(parsed.events),
            "counts": dict(sorted(counts.items())),
            "devices": devices,
            "metadata_lines": parsed.metadata_lines,
        }
    )


@main.command()
@click.argument("scenario_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@_guarded
def infer(scenario_dir: Path):
    """Classify the scenario's input log into gesture steps with UI targets."""
    report, _ = _run_fixture_pipeline(scenario_dir, annotations=None)
    _emit(report_to_dict(report)["steps"])


@main.group()
def report():
    """Build report bundles."""


@report.command("build")
@click.argument("scenario_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--title", default="", help="One-line summary of the bug.")
@click.option("--expected", default="", help="What should have happened.")
@click.option("--actual", default="", help="What happened instead.")
@click.option("--app", "app_package", default="", help="Package name under test.")
@click.option(
    "-o",
    "--out",
    "out_dir",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory to write report.json, report.html, attachments, and replay scripts.",
)
@_guarded
def report_build(
    scenario_dir: Path,
    title: str,
    expected: str,
    actual: str,
    app_package: str,
    out_dir: Path,
):
    """Run the full pipeline over a fixture scenario and write the bundle."""
    annotations = Annotations(title=title, expected_behavior=expected, actual_behavior=actual)
    built, assets = _run_fixture_pipeline(scenario_dir, annotations, app_package)
    path = write_bundle(built, assets, out_dir)
    _emit(
        {
            "id": built.id,
            "out": str(path),
            "steps": len(built.steps),
            "attachments": len(built.attachments),
        }
    )


@main.command()
@click.option("--app", "app_package", default="", help="Package name under test.")
@click.option(
    "--out",
    "out_dir",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory to write the report bundle.",
)
@click.option(
    "--bridge",
    "bridge_selector",
    default="real",
    envvar="ODBR_BRIDGE",
    show_default=True,
    help="Device bridge: real, real:<serial>, or fixture:<scenario-dir>.",
)
@click.option("--title", default="", help="Bug title (required when not a terminal).")
@click.option("--expected", default="", help="Expected behavior.")
@click.option("--actual", default="", help="Actual behavior.")
@click.option(
    "--max-duration",
    type=float,
    default=None,
    help="Stop recording after this many seconds (unattended sessions).",
)
@_guarded
def record(
    app_package: str,
    out_dir: Path,
    bridge_selector: str,
    title: str,
    expected: str,
    actual: str,
    max_duration: Optional[float],
):
    """Record a live session, then build the report bundle."""
    attended = sys.stdin.isatty()
    if not attended and not title:
        click.echo(
            "error: --title is required when standard input is not a terminal", err=True
        )
        raise SystemExit(1)
    config = SessionConfig(
        app_package=app_package,
        bridge=bridge_selector,
        unattended=not attended,
    )
    handle = start_session(config)
    click.echo("recording; interact with the device now", err=True)
    if attended:
        deadline = time.monotonic() + max_duration if max_duration else None
        while not handle.wait_stream_end(timeout=0.05):
            if deadline is not None and time.monotonic() >= deadline:
                break
            try:
                kind, idle_s = handle.session_events.get_nowait()
            except queue.Empty:
                continue
            if kind != "idle":
                continue
            click.echo(f"No input for {int(idle_s)}s — finish report? [y/N] ", err=True, nl=False)
            answer = sys.stdin.readline().strip().lower()
            if answer in ("y", "yes"):
                break
            handle.answer_idle(finish=False)
    else:
        handle.wait_stream_end(timeout=max_duration)
    capture = handle.stop()
    if attended:
        title = title or click.prompt("Title", default="", err=True)
        expected = expected or click.prompt("Expected behavior", default="", err=True)
        actual = actual or click.prompt("Actual behavior", default="", err=True)
    annotations = Annotations(title=title, expected_behavior=expected, actual_behavior=actual)
    interactions = analyze_events(capture.events, capture.axis_ranges(), capture.thresholds)
    built, assets = assemble_report(capture, interactions, annotations=annotations)
    path = write_bundle(built, assets, out_dir)
    _emit(
        {
            "id": built.id,
            "out": str(path),
            "steps": len(built.steps),
            "attachments": len(built.attachments),
        }
    )
    if attended and click.confirm("Replay the recording now to verify?", default=False, err=True):
        bridge = open_bridge(bridge_selector)
        try:
            outcome = replay_capture(bridge, capture.events)
            click.echo(f"replayed {outcome.injected_count} events", err=True)
        finally:
            bridge.close()


@main.group()
def replay():
    """Emit or execute replay scripts."""


@replay.command("emit")
@click.argument("report_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option(
    "--flavor",
    type=click.Choice(["sendevent", "adb"]),
    default="sendevent",
    show_default=True,
)
@click.option("-o", "--out", "out_file", type=click.Path(dir_okay=False, path_type=Path))
@_guarded
def replay_emit(report_dir: Path, flavor: str, out_file: Optional[Path]):
    """Regenerate a replay script from a stored report bundle."""
    built, assets = read_bundle(report_dir)
    events_text = assets.get(built.raw_events_ref or "", b"").decode("utf-8")
    sendevent, adb = build_replay_scripts(built, events_text)
    script = sendevent if flavor == "sendevent" else adb
    if out_file is None:
        click.echo(script, nl=False)
    else:
        out_file.parent.mkdir(parents=True, exist_ok=True)
        out_file.write_text(script)
        _emit({"flavor": flavor, "out": str(out_file), "bytes": len(script)})


@replay.command("run")
@click.argument("report_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--timing", default="preserve", show_default=True, help="preserve, max_speed, or fixed_gap:<ms>.")
@click.option(
    "--bridge",
    "bridge_selector",
    default="real",
    envvar="ODBR_BRIDGE",
    show_default=True,
    help="Device bridge to inject through.",
)
@_guarded
def replay_run(report_dir: Path, timing: str, bridge_selector: str):
    """Inject a stored report's raw events back through the bridge."""
    built, assets = read_bundle(report_dir)
    raw = assets.get(built.raw_events_ref or "")
    if raw is None:
        click.echo("error: bundle has no raw event log attachment", err=True)
        raise SystemExit(1)
    log = parse_getevent_log(raw.decode("utf-8"))
    bridge = open_bridge(bridge_selector)
    try:
        outcome = replay_capture(bridge, log.events, timing=parse_timing(timing))
    finally:
        bridge.close()
    _emit({"injected_count": outcome.injected_count, "duration_us": outcome.duration_us})


@main.command()
@click.argument("report_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--server", required=True, help="Report service base URL.")
@_guarded
def submit(report_dir: Path, server: str):
    """Upload a report bundle (document plus attachments) to the service."""
    json_path = report_dir / "report.json"
    if not json_path.is_file():
        click.echo(f"error: {json_path} not found", err=True)
        raise SystemExit(1)
    base = server.rstrip("/")
    with httpx.Client(timeout=30.0) as client:
        resp = client.post(
            f"{base}/reports",
            content=json_path.read_bytes(),
            headers={"Content-Type": "application/json"},
        )
        if resp.status_code == 422:
            for violation in resp.json().get("violations", [resp.text]):
                click.echo(f"error: {violation}", err=True)
            raise SystemExit(1)
        if resp.status_code not in (200, 201):
            click.echo(f"error: server answered {resp.status_code}: {resp.text}", err=True)
            raise SystemExit(1)
        doc_id = resp.json()["id"]
        revision = resp.json()["revision"]
        uploaded = 0
        attachments_dir = report_dir / "attachments"
        if attachments_dir.is_dir():
            for path in sorted(attachments_dir.iterdir()):
                if not path.is_file():
                    continue
                up = client.post(
                    f"{base}/reports/{doc_id}/attachments/{path.name}",
                    content=path.read_bytes(),
                    headers={"Content-Type": guess_content_type(path.name)},
                )
                if up.status_code not in (200, 201):
                    click.echo(
                        f"error: attachment {path.name} rejected "
                        f"({up.status_code}): {up.text}",
                        err=True,
                    )
                    raise SystemExit(1)
                uploaded += 1
    _emit({"id": doc_id, "revision": revision, "attachments": uploaded})


@main.command()
@click.option(
    "--store-root",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory holding stored report documents.",
)
@click.option("--bind", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=DEFAULT_PORT, show_default=True)
@click.option(
    "--ui",
    "ui_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Optional directory of static viewer files to mount at /ui.",
)
def serve(store_root: Path, bind: str, port: int, ui_dir: Optional[Path]):
    """Run the report service."""
    import uvicorn

    app = create_app(store_root, ui_dir=ui_dir)
    uvicorn.run(app, host=bind, port=port, log_level="info")


if __name__ == "__main__":
    main()
