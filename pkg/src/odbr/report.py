"""Bug reports: assemble captures into a versioned JSON document and HTML page.

A BugReport is the durable artifact: annotations, device metadata, one step
per detected interaction (with screenshot/dump references and the component
under the touch point), sensor traces, and an attachment table.  Documents
are schema-versioned, serialize with a fixed key order and explicit nulls,
and carry a content-addressed id.
"""

from __future__ import annotations

import hashlib
import html
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .capture import RawCapture
from .events import format_getevent_log
from .gestures import GestureKind, UserInteraction, describe
from .hierarchy import (
    HIT_POLICY,
    ComponentSummary,
    UiDumpParseError,
    component_summary,
    format_bounds,
    hit_test,
    parse_bounds,
    parse_ui_dump,
)
from .sensors import SensorTrace, summarize_trace

SCHEMA_VERSION = 1

REPORT_FIELDS = (
    "id",
    "schema_version",
    "title",
    "expected_behavior",
    "actual_behavior",
    "app_package",
    "device_info",
    "created_at",
    "hit_policy",
    "steps",
    "sensor_traces",
    "raw_events_ref",
    "attachments",
)

STEP_FIELDS = (
    "index",
    "kind",
    "description",
    "start_time_us",
    "end_time_us",
    "duration_ms",
    "start_point",
    "end_point",
    "finger_count",
    "key_code",
    "key_name",
    "target",
    "clickable_ancestor",
    "screenshot_ref",
    "ui_dump_ref",
)

TARGET_FIELDS = ("class_name", "resource_id", "text", "clickable", "bounds")

_KINDS = {k.value for k in GestureKind}

_STRING_FIELDS = (
    "id",
    "title",
    "expected_behavior",
    "actual_behavior",
    "app_package",
    "created_at",
    "hit_policy",
)

_DEVICE_KEYS = ("model", "os_version", "screen_width", "screen_height", "axis_ranges")


class ReportValidationError(ValueError):
    """Document rejected; carries every violation found, not just the first."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class ReportAssemblyError(ValueError):
    """Interactions and capture pairs cannot be matched 1:1."""


@dataclass
class Annotations:
    title: str = ""
    expected_behavior: str = ""
    actual_behavior: str = ""


@dataclass
class ReportStep:
    index: int
    kind: str
    description: str
    start_time_us: int
    end_time_us: int
    duration_ms: int
    start_point: Optional[tuple[int, int]] = None
    end_point: Optional[tuple[int, int]] = None
    finger_count: int = 0
    key_code: Optional[int] = None
    key_name: Optional[str] = None
    target: Optional[dict] = None
    clickable_ancestor: Optional[dict] = None
    screenshot_ref: Optional[str] = None
    ui_dump_ref: Optional[str] = None
    extra: dict = field(default_factory=dict)


@dataclass
class BugReport:
    id: str = ""
    schema_version: int = SCHEMA_VERSION
    title: str = ""
    expected_behavior: str = ""
    actual_behavior: str = ""
    app_package: str = ""
    device_info: dict = field(default_factory=dict)
    created_at: str = ""
    hit_policy: str = HIT_POLICY
    steps: list[ReportStep] = field(default_factory=list)
    sensor_traces: dict[str, dict] = field(default_factory=dict)
    raw_events_ref: Optional[str] = None
    attachments: dict[str, str] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def schema_path() -> Path:
    """Machine-readable document schema shipped with the package."""
    return Path(__file__).parent / "schema" / "bugreport_v1.json"


def guess_content_type(name: str) -> str:
    if name.endswith(".png"):
        return "image/png"
    if name.endswith(".xml"):
        return "application/xml"
    if name.endswith(".sh"):
        return "text/x-shellscript"
    if name.endswith(".json"):
        return "application/json"
    return "text/plain; charset=utf-8"


def summary_to_dict(summary: Optional[ComponentSummary]) -> Optional[dict]:
    if summary is None:
        return None
    return {
        "class_name": summary.class_name,
        "resource_id": summary.resource_id,
        "text": summary.text,
        "clickable": summary.clickable,
        "bounds": format_bounds(summary.bounds),
    }


def trace_to_doc(trace: SensorTrace) -> dict:
    return {
        "kind": trace.kind,
        "unit": trace.unit,
        "min_interval_ms": trace.min_interval_ms,
        "out_of_order": trace.out_of_order,
        "below_floor": trace.below_floor,
        "summary": summarize_trace(trace),
        "samples": [[s.timestamp, *s.values] for s in trace.samples],
    }


# -- assembly -----------------------------------------------------------------


def _resolve_target(xml: Optional[str], point: Optional[tuple[int, int]]):
    """Hit-test a step's dump at its start point; absent pieces resolve to None."""
    if xml is None or point is None:
        return None, None
    try:
        tree = parse_ui_dump(xml)
    except UiDumpParseError:
        return None, None
    node = hit_test(tree, point)
    if node is None:
        return None, None
    ancestor = tree.clickable_ancestor(node)
    return component_summary(node), component_summary(ancestor) if ancestor else None


def assemble_report(
    raw: RawCapture,
    interactions: Sequence[UserInteraction],
    hit_results: Optional[Sequence[Optional[tuple]]] = None,
    annotations: Optional[Annotations] = None,
) -> tuple[BugReport, dict[str, bytes]]:
    """Build the report document plus its attachment bytes.

    Each interaction is matched to the unused capture pair whose trigger
    timestamp is nearest at or before the interaction's start; a pair whose
    capture failed still matches, leaving that reference null.  Unmatchable
    interactions or leftover pairs are a hard error listing the orphans.
    """
    if hit_results is not None and len(hit_results) != len(interactions):
        raise ReportAssemblyError(
            f"hit_results length {len(hit_results)} != interaction count {len(interactions)}"
        )

    pairs = [
        {
            "trigger": trigger,
            "xml": xml,
            "shot_path": raw.screenshots[j][1],
            "index": j,
        }
        for j, (trigger, xml) in enumerate(raw.ui_dumps)
    ]

    used = [False] * len(pairs)
    matches: list[Optional[dict]] = []
    orphan_interactions = []
    for inter in interactions:
        best = None
        for j, pair in enumerate(pairs):
            if not used[j] and pair["trigger"] <= inter.start_time:
                best = j  # pairs are in firing order, so the last hit is nearest
        if best is None:
            orphan_interactions.append(inter.index)
            matches.append(None)
        else:
            used[best] = True
            matches.append(pairs[best])
    orphan_pairs = [p["index"] for j, p in enumerate(pairs) if not used[j]]
    if orphan_interactions or orphan_pairs:
        raise ReportAssemblyError(
            f"capture pairs and interactions do not align: "
            f"unmatched interactions {orphan_interactions}, unmatched pairs {orphan_pairs}"
        )

    annotations = annotations or Annotations()
    assets: dict[str, bytes] = {}
    attachments: dict[str, str] = {}
    steps: list[ReportStep] = []
    for i, inter in enumerate(interactions):
        pair = matches[i]
        screenshot_ref = ui_dump_ref = None
        xml = None
        if pair is not None:
            xml = pair["xml"]
            if pair["shot_path"] is not None:
                screenshot_ref = f"screenshot-{pair['index']:03d}.png"
                with open(pair["shot_path"], "rb") as fh:
                    assets[screenshot_ref] = fh.read()
                attachments[screenshot_ref] = "image/png"
            if xml is not None:
                ui_dump_ref = f"ui-dump-{pair['index']:03d}.xml"
                assets[ui_dump_ref] = xml.encode("utf-8")
                attachments[ui_dump_ref] = "application/xml"

        if hit_results is not None:
            target, ancestor = hit_results[i] if hit_results[i] is not None else (None, None)
        else:
            target, ancestor = _resolve_target(xml, inter.start_point)
        # descriptions depend on the resolved component, so write them here
        inter.target = target
        inter.clickable_ancestor = ancestor
        inter.description = describe(inter)

        steps.append(
            ReportStep(
                index=inter.index,
                kind=inter.kind.value,
                description=inter.description,
                start_time_us=inter.start_time,
                end_time_us=inter.end_time,
                duration_ms=inter.duration_ms,
                start_point=inter.start_point,
                end_point=inter.end_point,
                finger_count=inter.finger_count,
                key_code=inter.key_code,
                key_name=inter.key_name,
                target=summary_to_dict(target),
                clickable_ancestor=summary_to_dict(ancestor),
                screenshot_ref=screenshot_ref,
                ui_dump_ref=ui_dump_ref,
            )
        )

    raw_events_ref = "events.getevent"
    assets[raw_events_ref] = format_getevent_log(raw.events).encode("utf-8")
    attachments[raw_events_ref] = "text/plain; charset=utf-8"

    report = BugReport(
        title=annotations.title,
        expected_behavior=annotations.expected_behavior,
        actual_behavior=annotations.actual_behavior,
        app_package=raw.app_package,
        device_info=dict(raw.device_info),
        created_at=raw.created_at,
        hit_policy=HIT_POLICY,
        steps=steps,
        sensor_traces={k: trace_to_doc(raw.sensor_traces[k]) for k in sorted(raw.sensor_traces)},
        raw_events_ref=raw_events_ref,
        attachments=attachments,
    )
    report.id = compute_report_id(report)
    return report, assets


# -- serialization ------------------------------------------------------------


def _step_to_dict(step: ReportStep) -> dict:
    doc = {
        "index": step.index,
        "kind": step.kind,
        "description": step.description,
        "start_time_us": step.start_time_us,
        "end_time_us": step.end_time_us,
        "duration_ms": step.duration_ms,
        "start_point": list(step.start_point) if step.start_point else None,
        "end_point": list(step.end_point) if step.end_point else None,
        "finger_count": step.finger_count,
        "key_code": step.key_code,
        "key_name": step.key_name,
        "target": step.target,
        "clickable_ancestor": step.clickable_ancestor,
        "screenshot_ref": step.screenshot_ref,
        "ui_dump_ref": step.ui_dump_ref,
    }
    for key in sorted(step.extra):
        doc[key] = step.extra[key]
    return doc


def report_to_dict(report: BugReport) -> dict:
    doc = {
        "id": report.id,
        "schema_version": report.schema_version,
        "title": report.title,
        "expected_behavior": report.expected_behavior,
        "actual_behavior": report.actual_behavior,
        "app_package": report.app_package,
        "device_info": report.device_info,
        "created_at": report.created_at,
        "hit_policy": report.hit_policy,
        "steps": [_step_to_dict(s) for s in report.steps],
        "sensor_traces": report.sensor_traces,
        "raw_events_ref": report.raw_events_ref,
        "attachments": report.attachments,
    }
    for key in sorted(report.extra):  # unknown fields ride along after known ones
        doc[key] = report.extra[key]
    return doc


def to_json(report: BugReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"


def compute_report_id(report: BugReport) -> str:
    """Content-addressed id: hash of the canonical document minus the id itself."""
    doc = report_to_dict(report)
    doc.pop("id", None)
    canonical = json.dumps(doc, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _check_step(doc: dict, position: int, attachments, violations: list[str]) -> None:
    prefix = f"step {position}"
    for name in ("index", "kind", "description"):
        if name not in doc:
            violations.append(f"{prefix} missing required field: {name}")
    index = doc.get("index")
    if isinstance(index, int) and index != position:
        violations.append(
            f"steps must be indexed 0..n-1 contiguously: position {position} has index {index}"
        )
    kind = doc.get("kind")
    if kind is not None and kind not in _KINDS:
        violations.append(f"{prefix} has unknown kind {kind!r}")
    for ref_name in ("screenshot_ref", "ui_dump_ref"):
        ref = doc.get(ref_name)
        if ref is not None and not isinstance(ref, str):
            violations.append(f"{prefix} {ref_name} must be a string or null")
        elif isinstance(ref, str) and isinstance(attachments, dict) and ref not in attachments:
            violations.append(f"{prefix} {ref_name} {ref!r} not present in attachments")
    for side in ("target", "clickable_ancestor"):
        comp = doc.get(side)
        if comp is None:
            continue
        if not isinstance(comp, dict):
            violations.append(f"{prefix} {side} must be an object or null")
            continue
        bounds = comp.get("bounds")
        if bounds is None:
            continue
        if not isinstance(bounds, str):
            violations.append(f"{prefix} {side} bounds {bounds!r} are not [l,t][r,b]")
            continue
        try:
            parse_bounds(bounds)
        except ValueError:
            violations.append(f"{prefix} {side} bounds {bounds!r} are not [l,t][r,b]")


def validate_document(doc) -> list[str]:
    """Every violation in the document, in a stable order; empty means valid."""
    if not isinstance(doc, dict):
        return ["document is not a JSON object"]
    violations: list[str] = []
    for name in REPORT_FIELDS:
        if name not in doc:
            violations.append(f"missing required field: {name}")

    version = doc.get("schema_version")
    if version is not None or "schema_version" in doc:
        if not isinstance(version, int) or isinstance(version, bool):
            violations.append("schema_version must be an integer")
        elif version > SCHEMA_VERSION:
            violations.append(
                f"schema_version {version} is newer than the supported version {SCHEMA_VERSION}"
            )
        elif version < 1:
            violations.append("schema_version must be >= 1")

    for name in _STRING_FIELDS:
        if name in doc and not isinstance(doc[name], str):
            violations.append(f"{name} must be a string")

    device = doc.get("device_info")
    if device is not None:
        if not isinstance(device, dict):
            violations.append("device_info must be an object")
        else:
            for key in _DEVICE_KEYS:
                if key not in device:
                    violations.append(f"device_info missing field: {key}")

    attachments = doc.get("attachments")
    if attachments is not None:
        if not isinstance(attachments, dict):
            violations.append("attachments must be a name-to-content-type object")
        else:
            for name, ctype in attachments.items():
                if not isinstance(ctype, str):
                    violations.append(f"attachment {name!r} content type must be a string")

    raw_ref = doc.get("raw_events_ref")
    if raw_ref is not None and not isinstance(raw_ref, str):
        violations.append("raw_events_ref must be a string or null")
    elif isinstance(raw_ref, str) and isinstance(attachments, dict) and raw_ref not in attachments:
        violations.append(f"raw_events_ref {raw_ref!r} not present in attachments")

    traces = doc.get("sensor_traces")
    if traces is not None:
        if not isinstance(traces, dict):
            violations.append("sensor_traces must be an object keyed by sensor kind")
        else:
            for kind, trace in traces.items():
                if not isinstance(trace, dict) or not isinstance(trace.get("samples"), list):
                    violations.append(f"sensor trace {kind!r} must carry a samples list")

    steps = doc.get("steps")
    if steps is not None:
        if not isinstance(steps, list):
            violations.append("steps must be a list")
        else:
            for position, step in enumerate(steps):
                if not isinstance(step, dict):
                    violations.append(f"step {position} is not an object")
                    continue
                _check_step(step, position, attachments, violations)
    return violations


def _point(value) -> Optional[tuple[int, int]]:
    return (value[0], value[1]) if isinstance(value, list) and len(value) == 2 else None


def from_json(text: str) -> BugReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportValidationError([f"document is not valid JSON: {exc}"]) from exc
    violations = validate_document(doc)
    if violations:
        raise ReportValidationError(violations)

    steps = []
    for raw_step in doc["steps"]:
        known = {k: raw_step.get(k) for k in STEP_FIELDS}
        steps.append(
            ReportStep(
                index=known["index"],
                kind=known["kind"],
                description=known["description"],
                start_time_us=known["start_time_us"],
                end_time_us=known["end_time_us"],
                duration_ms=known["duration_ms"],
                start_point=_point(known["start_point"]),
                end_point=_point(known["end_point"]),
                finger_count=known["finger_count"],
                key_code=known["key_code"],
                key_name=known["key_name"],
                target=known["target"],
                clickable_ancestor=known["clickable_ancestor"],
                screenshot_ref=known["screenshot_ref"],
                ui_dump_ref=known["ui_dump_ref"],
                extra={k: v for k, v in raw_step.items() if k not in STEP_FIELDS},
            )
        )

    return BugReport(
        id=doc["id"],
        schema_version=doc["schema_version"],
        title=doc["title"],
        expected_behavior=doc["expected_behavior"],
        actual_behavior=doc["actual_behavior"],
        app_package=doc["app_package"],
        device_info=doc["device_info"],
        created_at=doc["created_at"],
        hit_policy=doc["hit_policy"],
        steps=steps,
        sensor_traces=doc["sensor_traces"],
        raw_events_ref=doc["raw_events_ref"],
        attachments=doc["attachments"],
        extra={k: v for k, v in doc.items() if k not in REPORT_FIELDS},
    )


# -- HTML ---------------------------------------------------------------------

_STYLE = """\
body { font-family: sans-serif; margin: 2em auto; max-width: 60em; color: #222; }
h1 { border-bottom: 2px solid #444; padding-bottom: 0.2em; }
table.meta, table.component, table.sensor { border-collapse: collapse; margin: 0.5em 0; }
table.meta td, table.component td, table.component th,
table.sensor td, table.sensor th { border: 1px solid #bbb; padding: 0.25em 0.6em; }
section.step { border: 1px solid #ccc; border-radius: 4px; padding: 0.5em 1em; margin: 1em 0; }
img.screenshot { border: 1px solid #888; max-width: 24em; display: block; }
div.placeholder { border: 1px dashed #999; color: #666; padding: 1em; max-width: 24em; }
p.timing { color: #555; font-size: 0.9em; }
"""


def _esc(text: str) -> str:
    return html.escape(str(text), quote=False)


def _attr(text: str) -> str:
    return html.escape(str(text), quote=True)


def _component_table(title: str, comp: dict) -> list[str]:
    return [
        f'<table class="component"><caption>{_esc(title)}</caption>',
        f"<tr><th>class</th><td>{_esc(comp.get('class_name', ''))}</td></tr>",
        f"<tr><th>resource id</th><td>{_esc(comp.get('resource_id') or '')}</td></tr>",
        f"<tr><th>text</th><td>{_esc(comp.get('text') or '')}</td></tr>",
        f"<tr><th>clickable</th><td>{'yes' if comp.get('clickable') else 'no'}</td></tr>",
        f"<tr><th>bounds</th><td>{_esc(comp.get('bounds', ''))}</td></tr>",
        "</table>",
    ]


def render_html(
    report: BugReport,
    asset_resolver: Optional[Callable[[str], str]] = None,
    replay_links: Optional[dict[str, str]] = None,
) -> str:
    """One self-contained page: header, annotations, steps, sensors, replay links.

    asset_resolver maps attachment names to URLs (default: relative
    `attachments/<name>`); missing assets render as labeled placeholders.
    """
    resolve = asset_resolver or (lambda name: f"attachments/{name}")
    links = replay_links or {"sendevent": "replay-sendevent.sh", "adb": "replay-adb.sh"}
    device = report.device_info or {}

    out = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{_esc(report.title or 'Bug report')}</title>",
        f"<style>\n{_STYLE}</style>",
        "</head>",
        "<body>",
        f"<h1>{_esc(report.title or 'Bug report')}</h1>",
        '<table class="meta">',
        f"<tr><td>app</td><td>{_esc(report.app_package)}</td></tr>",
        f"<tr><td>device</td><td>{_esc(device.get('model', ''))} "
        f"(Android {_esc(device.get('os_version', ''))})</td></tr>",
        f"<tr><td>screen</td><td>{_esc(device.get('screen_width', ''))}x"
        f"{_esc(device.get('screen_height', ''))}</td></tr>",
        f"<tr><td>created</td><td>{_esc(report.created_at)}</td></tr>",
        f"<tr><td>report id</td><td>{_esc(report.id)}</td></tr>",
        f"<tr><td>hit policy</td><td>{_esc(report.hit_policy)}</td></tr>",
        "</table>",
        "<h2>Expected behavior</h2>",
        f"<p>{_esc(report.expected_behavior) or '<em>not provided</em>'}</p>",
        "<h2>Actual behavior</h2>",
        f"<p>{_esc(report.actual_behavior) or '<em>not provided</em>'}</p>",
        f"<h2>Steps ({len(report.steps)})</h2>",
    ]

    for step in report.steps:
        out.append(f'<section class="step" id="step-{step.index}">')
        out.append(f"<h3>Step {step.index + 1}</h3>")
        out.append(f"<p>{_esc(step.description)}</p>")
        if step.screenshot_ref:
            out.append(
                f'<img class="screenshot" src="{_attr(resolve(step.screenshot_ref))}"'
                f' alt="screenshot for step {step.index + 1}">'
            )
        else:
            out.append('<div class="placeholder">no screenshot captured</div>')
        if step.target:
            out.extend(_component_table("component under touch", step.target))
        elif step.start_point is not None:
            out.append('<div class="placeholder">no component resolved</div>')
        if step.clickable_ancestor:
            out.extend(_component_table("nearest clickable ancestor", step.clickable_ancestor))
        timing = f"start {step.start_time_us} us, duration {step.duration_ms} ms"
        if step.ui_dump_ref:
            out.append(
                f'<p class="timing">{_esc(timing)} &middot; '
                f'<a href="{_attr(resolve(step.ui_dump_ref))}">UI dump</a></p>'
            )
        else:
            out.append(f'<p class="timing">{_esc(timing)} &middot; no UI dump captured</p>')
        out.append("</section>")

    out.append("<h2>Sensor traces</h2>")
    if not report.sensor_traces:
        out.append("<p><em>none recorded</em></p>")
    for kind in report.sensor_traces:
        trace = report.sensor_traces[kind]
        summary = trace.get("summary", {})
        out.append(f"<h3>{_esc(kind)}</h3>")
        figure = f"sensor-{kind}.png"
        if figure in report.attachments:
            out.append(
                f'<img class="screenshot" src="{_attr(resolve(figure))}"'
                f' alt="{_attr(kind)} trace">'
            )
        out.append('<table class="sensor">')
        out.append(
            f"<tr><th>samples</th><td>{summary.get('count', 0)}</td>"
            f"<th>span</th><td>{summary.get('t_span_us', 0)} us</td>"
            f"<th>unit</th><td>{_esc(trace.get('unit', ''))}</td></tr>"
        )
        for i, axis in enumerate(summary.get("axes", [])):
            out.append(
                f"<tr><th>axis {i}</th><td>min {axis['min']}</td>"
                f"<td>max {axis['max']}</td><td>mean {axis['mean']}</td></tr>"
            )
        out.append("</table>")

    out.append("<h2>Replay</h2>")
    out.append("<ul>")
    if "sendevent" in links:
        out.append(f'<li><a href="{_attr(links["sendevent"])}">sendevent script (exact)</a></li>')
    if "adb" in links:
        out.append(f'<li><a href="{_attr(links["adb"])}">adb input script (portable)</a></li>')
    out.append("</ul>")
    if report.raw_events_ref:
        out.append(
            f'<p><a href="{_attr(resolve(report.raw_events_ref))}">raw event log</a></p>'
        )
    out.append("</body>")
    out.append("</html>")
    return "\n".join(out) + "\n"
