// Pure HTML string builders; app.ts owns the DOM and event wiring. Text
// nodes keep quotes verbatim (descriptions read exactly as stored), while
// attribute values get the full escape set.

import { formatRoute } from "./router.js";
import type {
  ComponentSummary,
  ReportDocument,
  ReportListEntry,
  ReportStep,
  SensorTraceDoc,
} from "./types.js";

export function escapeText(value: string): string {
  return value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function escapeAttr(value: string): string {
  return escapeText(value).replace(/"/g, "&quot;").replace(/'/g, "&#x27;");
}

export interface ReportUrls {
  attachment(name: string): string;
  replay(flavor: "sendevent" | "adb"): string;
}

export function renderError(message: string): string {
  return `<div class="banner error">${escapeText(message)}</div>`;
}

export function renderConflictBanner(currentRevision: number): string {
  return (
    `<div class="banner conflict" data-role="conflict">` +
    `Someone else changed this report; it is now at revision ${currentRevision}. ` +
    `Your edits are still in the form. ` +
    `<button type="button" data-action="reload-latest">Reload latest, keep my edits</button>` +
    `</div>`
  );
}

export function renderListView(entries: ReportListEntry[]): string {
  if (entries.length === 0) {
    return `<section class="list"><h1>Reports</h1><p class="empty">no reports yet</p></section>`;
  }
  const rows = entries
    .map((entry) => {
      const href = formatRoute({ view: "report", id: entry.id, step: 0 });
      const title = entry.title.trim() === "" ? "(untitled)" : entry.title;
      return (
        `<tr>` +
        `<td><a href="${escapeAttr(href)}">${escapeText(title)}</a></td>` +
        `<td><code>${escapeText(entry.id)}</code></td>` +
        `<td>${escapeText(entry.created_at)}</td>` +
        `<td class="num">${entry.step_count}</td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<section class="list"><h1>Reports</h1>` +
    `<table><thead><tr><th>title</th><th>id</th><th>created</th><th>steps</th></tr></thead>` +
    `<tbody>${rows}</tbody></table></section>`
  );
}

function componentTable(label: string, component: ComponentSummary | null): string {
  if (component === null) return "";
  const row = (key: string, value: unknown): string =>
    value === null || value === undefined
      ? ""
      : `<tr><th>${escapeText(key)}</th><td>${escapeText(String(value))}</td></tr>`;
  return (
    `<table class="component"><caption>${escapeText(label)}</caption>` +
    row("class", component.class_name) +
    row("resource id", component.resource_id) +
    row("text", component.text) +
    row("clickable", component.clickable) +
    row("bounds", component.bounds) +
    `</table>`
  );
}

function stepPanel(doc: ReportDocument, step: ReportStep, urls: ReportUrls): string {
  const parts: string[] = [];
  parts.push(`<article class="step" data-step="${step.index}">`);
  parts.push(`<h2>Step ${step.index + 1}: ${escapeText(step.kind)}</h2>`);
  parts.push(`<p class="description">${escapeText(step.description)}</p>`);
  if (step.screenshot_ref !== null && step.screenshot_ref in doc.attachments) {
    parts.push(
      `<img class="screenshot" alt="screenshot for step ${step.index + 1}" ` +
        `src="${escapeAttr(urls.attachment(step.screenshot_ref))}">`,
    );
  } else {
    parts.push(`<p class="placeholder">no screenshot captured</p>`);
  }
  parts.push(componentTable("target", step.target));
  parts.push(componentTable("clickable ancestor", step.clickable_ancestor));
  const timing = `${(step.start_time_us / 1e6).toFixed(3)}s to ${(step.end_time_us / 1e6).toFixed(3)}s (${step.duration_ms}ms)`;
  const dumpLink =
    step.ui_dump_ref !== null && step.ui_dump_ref in doc.attachments
      ? ` · <a href="${escapeAttr(urls.attachment(step.ui_dump_ref))}">UI dump</a>`
      : "";
  parts.push(`<p class="timing">${escapeText(timing)}${dumpLink}</p>`);
  parts.push(`</article>`);
  return parts.join("");
}

function timelineNav(doc: ReportDocument, stepIndex: number): string {
  const total = doc.steps.length;
  const links = doc.steps
    .map((step) => {
      const href = formatRoute({ view: "report", id: doc.id, step: step.index });
      const current = step.index === stepIndex ? ` class="current"` : "";
      return (
        `<li${current}><a href="${escapeAttr(href)}">` +
        `${step.index + 1}. ${escapeText(step.description)}</a></li>`
      );
    })
    .join("");
  const prevDisabled = stepIndex <= 0 ? " disabled" : "";
  const nextDisabled = stepIndex >= total - 1 ? " disabled" : "";
  return (
    `<nav class="timeline">` +
    `<button type="button" data-action="prev-step"${prevDisabled}>previous</button>` +
    `<span class="position">Step ${stepIndex + 1} of ${total}</span>` +
    `<button type="button" data-action="next-step"${nextDisabled}>next</button>` +
    `<ol class="steps">${links}</ol>` +
    `</nav>`
  );
}

function sensorSection(traces: Record<string, SensorTraceDoc>): string {
  const kinds = Object.keys(traces).sort();
  if (kinds.length === 0) return "";
  const tables = kinds
    .map((kind) => {
      const trace = traces[kind];
      const axes = trace.summary.axes ?? [];
      const axisRows = axes
        .map(
          (axis, i) =>
            `<tr><th>axis ${i}</th><td>${axis.min}</td><td>${axis.max}</td>` +
            `<td>${axis.mean.toFixed(4)}</td></tr>`,
        )
        .join("");
      return (
        `<table class="sensor"><caption>${escapeText(kind)} (${escapeText(trace.unit)})</caption>` +
        `<tr><th>samples</th><td colspan="3">${trace.summary.count}</td></tr>` +
        (trace.summary.t_span_us !== undefined
          ? `<tr><th>span</th><td colspan="3">${(trace.summary.t_span_us / 1e6).toFixed(3)}s</td></tr>`
          : "") +
        (axisRows ? `<tr><th></th><th>min</th><th>max</th><th>mean</th></tr>${axisRows}` : "") +
        `</table>`
      );
    })
    .join("");
  return `<section class="sensors"><h2>Sensors</h2>${tables}</section>`;
}

function annotationForm(doc: ReportDocument): string {
  return (
    `<form class="annotations" data-role="annotations">` +
    `<div data-role="banner-slot"></div>` +
    `<label>Title <input name="title" value="${escapeAttr(doc.title)}"></label>` +
    `<label>Expected <textarea name="expected_behavior">${escapeText(doc.expected_behavior)}</textarea></label>` +
    `<label>Actual <textarea name="actual_behavior">${escapeText(doc.actual_behavior)}</textarea></label>` +
    `<button type="submit" data-action="save-annotations">Save</button>` +
    `<span class="save-state" data-role="save-state"></span>` +
    `</form>`
  );
}

export function renderReportView(
  doc: ReportDocument,
  stepIndex: number,
  urls: ReportUrls,
): string {
  const clamped = Math.min(Math.max(stepIndex, 0), Math.max(doc.steps.length - 1, 0));
  const device = doc.device_info ?? {};
  const parts: string[] = [];
  parts.push(`<section class="report" data-report="${escapeAttr(doc.id)}">`);
  parts.push(`<p class="crumbs"><a href="#/">all reports</a></p>`);
  parts.push(`<h1>${escapeText(doc.title.trim() === "" ? "(untitled)" : doc.title)}</h1>`);
  parts.push(
    `<p class="meta"><code>${escapeText(doc.id)}</code> · ${escapeText(doc.app_package)} · ` +
      `${escapeText(String(device["model"] ?? ""))} · ${escapeText(doc.created_at)}</p>`,
  );
  parts.push(annotationForm(doc));
  if (doc.steps.length === 0) {
    parts.push(`<p class="empty">this report has no steps</p>`);
  } else {
    parts.push(timelineNav(doc, clamped));
    parts.push(stepPanel(doc, doc.steps[clamped], urls));
  }
  parts.push(sensorSection(doc.sensor_traces));
  parts.push(
    `<section class="replay"><h2>Replay</h2><ul>` +
      `<li><a href="${escapeAttr(urls.replay("sendevent"))}" download>sendevent script (exact timing)</a></li>` +
      `<li><a href="${escapeAttr(urls.replay("adb"))}" download>adb input script (approximate)</a></li>` +
      (doc.raw_events_ref !== null && doc.raw_events_ref in doc.attachments
        ? `<li><a href="${escapeAttr(urls.attachment(doc.raw_events_ref))}">raw event log</a></li>`
        : "") +
      `</ul></section>`,
  );
  parts.push(`</section>`);
  return parts.join("");
}
