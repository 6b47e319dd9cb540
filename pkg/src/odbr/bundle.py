"""Report bundles: the on-disk directory a finished report is written into.

Layout:

    <out>/report.json             canonical document
    <out>/report.html             self-contained page, relative asset links
    <out>/replay-sendevent.sh     exact replay script
    <out>/replay-adb.sh           portable approximation
    <out>/attachments/<name>      screenshots, UI dumps, raw event log, figures
"""

from __future__ import annotations

from pathlib import Path

from .events import parse_getevent_log
from .figures import render_all_figures
from .gestures import GestureKind, UserInteraction
from .replay import PRESERVE, default_device_map, emit_adb_script, emit_sendevent_script
from .report import BugReport, ReportStep, compute_report_id, from_json, render_html, to_json


def steps_to_interactions(steps: list[ReportStep]) -> list[UserInteraction]:
    """Rehydrate stored steps far enough for script emission."""
    return [
        UserInteraction(
            index=s.index,
            kind=GestureKind(s.kind),
            start_time=s.start_time_us,
            end_time=s.end_time_us,
            duration_ms=s.duration_ms,
            start_point=s.start_point,
            end_point=s.end_point,
            finger_count=s.finger_count,
            key_code=s.key_code,
            key_name=s.key_name,
            description=s.description,
        )
        for s in steps
    ]


def build_replay_scripts(report: BugReport, events_text: str) -> tuple[str, str]:
    """(sendevent script, adb script) regenerated from the stored document."""
    events = parse_getevent_log(events_text).events
    sendevent = emit_sendevent_script(
        events, default_device_map(events), PRESERVE, report_id=report.id
    )
    adb = emit_adb_script(steps_to_interactions(report.steps), report_id=report.id)
    return sendevent, adb


def write_bundle(report: BugReport, assets: dict[str, bytes], out_dir: str | Path) -> Path:
    """Add sensor figures, finalize the content-addressed id, write everything."""
    out = Path(out_dir)
    figures = render_all_figures(report.sensor_traces)
    for name, png in figures.items():
        assets[name] = png
        report.attachments[name] = "image/png"
    report.id = compute_report_id(report)

    attachments_dir = out / "attachments"
    attachments_dir.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(to_json(report), encoding="utf-8")
    (out / "report.html").write_text(render_html(report), encoding="utf-8")
    for name, data in assets.items():
        (attachments_dir / name).write_bytes(data)

    events_text = ""
    if report.raw_events_ref and report.raw_events_ref in assets:
        events_text = assets[report.raw_events_ref].decode("utf-8")
    sendevent, adb = build_replay_scripts(report, events_text)
    (out / "replay-sendevent.sh").write_text(sendevent, encoding="utf-8")
    (out / "replay-adb.sh").write_text(adb, encoding="utf-8")
    return out


def read_bundle(report_dir: str | Path) -> tuple[BugReport, dict[str, bytes]]:
    """Load a bundle directory back into (report, attachment bytes)."""
    root = Path(report_dir)
    report = from_json((root / "report.json").read_text(encoding="utf-8"))
    assets = {}
    attachments_dir = root / "attachments"
    if attachments_dir.is_dir():
        for path in sorted(attachments_dir.iterdir()):
            if path.is_file():
                assets[path.name] = path.read_bytes()
    return report, assets
