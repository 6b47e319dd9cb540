import { describe, expect, it } from "vitest";

import {
  escapeAttr,
  escapeText,
  renderConflictBanner,
  renderListView,
  renderReportView,
  type ReportUrls,
} from "../src/render.js";
import { LISTING, THREE_STEP_DOC } from "./fixtures.js";

const URLS: ReportUrls = {
  attachment: (name) => `/reports/${THREE_STEP_DOC.id}/attachments/${name}`,
  replay: (flavor) => `/reports/${THREE_STEP_DOC.id}/replay/${flavor}`,
};

describe("escaping", () => {
  it("text keeps quotes verbatim but neutralizes angle brackets", () => {
    expect(escapeText("Tap on 'OK' <now> & go")).toBe("Tap on 'OK' &lt;now&gt; &amp; go");
  });

  it("attributes escape quotes too", () => {
    expect(escapeAttr(`a"b'c`)).toBe("a&quot;b&#x27;c");
  });
});

describe("renderListView", () => {
  it("renders one linked row per report", () => {
    const html = renderListView(LISTING);
    expect(html).toContain('href="#/reports/27bf757b690056b9"');
    expect(html).toContain("list row vanishes");
    expect(html).toContain("(untitled)");
    expect(html).toContain('<td class="num">3</td>');
  });

  it("empty listing says so", () => {
    expect(renderListView([])).toContain("no reports yet");
  });
});

describe("renderReportView", () => {
  it("shows the selected step with its description verbatim", () => {
    const html = renderReportView(THREE_STEP_DOC, 0, URLS);
    expect(html).toContain("Tap on android.widget.Button 'OK' at (540,960)");
    expect(html).toContain("Step 1 of 3");
    expect(html).toContain(
      `src="/reports/${THREE_STEP_DOC.id}/attachments/screenshot-000.png"`,
    );
    expect(html).toContain("com.example:id/ok");
  });

  it("every step is deep-linkable from the timeline", () => {
    const html = renderReportView(THREE_STEP_DOC, 1, URLS);
    expect(html).toContain(`href="#/reports/${THREE_STEP_DOC.id}"`);
    expect(html).toContain(`href="#/reports/${THREE_STEP_DOC.id}/steps/1"`);
    expect(html).toContain(`href="#/reports/${THREE_STEP_DOC.id}/steps/2"`);
    expect(html).toContain("Step 2 of 3");
    expect(html).toContain(
      "Long-press on android.widget.TextView 'Delete item' at (200,300) for 900ms",
    );
  });

  it("a step without a screenshot renders the placeholder", () => {
    const html = renderReportView(THREE_STEP_DOC, 2, URLS);
    expect(html).toContain("no screenshot captured");
    expect(html).not.toContain("screenshot-002.png");
  });

  it("nav buttons disable at the edges", () => {
    expect(renderReportView(THREE_STEP_DOC, 0, URLS)).toContain(
      'data-action="prev-step" disabled',
    );
    expect(renderReportView(THREE_STEP_DOC, 2, URLS)).toContain(
      'data-action="next-step" disabled',
    );
    const middle = renderReportView(THREE_STEP_DOC, 1, URLS);
    expect(middle).not.toContain('data-action="prev-step" disabled');
    expect(middle).not.toContain('data-action="next-step" disabled');
  });

  it("out-of-range step indexes clamp instead of crashing", () => {
    expect(renderReportView(THREE_STEP_DOC, 99, URLS)).toContain("Step 3 of 3");
    expect(renderReportView(THREE_STEP_DOC, -5, URLS)).toContain("Step 1 of 3");
  });

  it("annotations are editable form fields", () => {
    const html = renderReportView(THREE_STEP_DOC, 0, URLS);
    expect(html).toContain('name="title" value="list row vanishes"');
    expect(html).toContain(">row stays</textarea>");
    expect(html).toContain(">row gone</textarea>");
    expect(html).toContain('data-action="save-annotations"');
  });

  it("sensor summaries render per kind", () => {
    const html = renderReportView(THREE_STEP_DOC, 0, URLS);
    expect(html).toContain("accelerometer (m/s^2)");
    expect(html).toContain("<th>samples</th><td colspan=\"3\">3</td>");
    expect(html).toContain("9.82");
  });

  it("replay downloads link to the service endpoints", () => {
    const html = renderReportView(THREE_STEP_DOC, 0, URLS);
    expect(html).toContain(`href="/reports/${THREE_STEP_DOC.id}/replay/sendevent"`);
    expect(html).toContain(`href="/reports/${THREE_STEP_DOC.id}/replay/adb"`);
    expect(html).toContain(`href="/reports/${THREE_STEP_DOC.id}/attachments/events.getevent"`);
  });

  it("hostile titles cannot inject markup", () => {
    const doc = { ...THREE_STEP_DOC, title: '<script>alert(1)</script>' };
    const html = renderReportView(doc, 0, URLS);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("renderConflictBanner", () => {
  it("names the current revision and offers the retry path", () => {
    const html = renderConflictBanner(4);
    expect(html).toContain("revision 4");
    expect(html).toContain('data-action="reload-latest"');
  });
});
