// A three-step document shaped exactly like the service's output.

import type { ReportDocument, ReportListEntry } from "../src/types.js";

export const THREE_STEP_DOC: ReportDocument = {
  id: "27bf757b690056b9",
  schema_version: 1,
  title: "list row vanishes",
  expected_behavior: "row stays",
  actual_behavior: "row gone",
  app_package: "com.example.demo",
  device_info: {
    model: "sdk_gphone64_x86_64",
    os_version: "13",
    screen_width: 1080,
    screen_height: 1920,
  },
  created_at: "2026-08-01T10:00:00Z",
  hit_policy: "deepest-then-document-order",
  steps: [
    {
      index: 0,
      kind: "Tap",
      description: "Tap on android.widget.Button 'OK' at (540,960)",
      start_time_us: 0,
      end_time_us: 80000,
      duration_ms: 80,
      start_point: [540, 960],
      end_point: [540, 960],
      finger_count: 1,
      key_code: null,
      key_name: null,
      target: {
        class_name: "android.widget.Button",
        resource_id: "com.example:id/ok",
        text: "OK",
        clickable: true,
        bounds: "[490,910][590,1010]",
      },
      clickable_ancestor: null,
      screenshot_ref: "screenshot-000.png",
      ui_dump_ref: "ui-dump-000.xml",
    },
    {
      index: 1,
      kind: "LongPress",
      description: "Long-press on android.widget.TextView 'Delete item' at (200,300) for 900ms",
      start_time_us: 1500000,
      end_time_us: 2400000,
      duration_ms: 900,
      start_point: [200, 300],
      end_point: [201, 301],
      finger_count: 1,
      key_code: null,
      key_name: null,
      target: {
        class_name: "android.widget.TextView",
        resource_id: "com.example:id/row_delete",
        text: "Delete item",
        clickable: true,
        bounds: "[150,250][930,350]",
      },
      clickable_ancestor: null,
      screenshot_ref: "screenshot-001.png",
      ui_dump_ref: "ui-dump-001.xml",
    },
    {
      index: 2,
      kind: "Swipe",
      description: "Swipe from (100,1200) to (800,1200)",
      start_time_us: 3400000,
      end_time_us: 3700000,
      duration_ms: 300,
      start_point: [100, 1200],
      end_point: [800, 1200],
      finger_count: 1,
      key_code: null,
      key_name: null,
      target: {
        class_name: "android.widget.TextView",
        resource_id: null,
        text: "Row 2",
        clickable: false,
        bounds: "[0,1150][1080,1250]",
      },
      clickable_ancestor: null,
      screenshot_ref: null,
      ui_dump_ref: "ui-dump-002.xml",
    },
  ],
  sensor_traces: {
    accelerometer: {
      kind: "accelerometer",
      unit: "m/s^2",
      min_interval_ms: 0,
      out_of_order: 0,
      below_floor: 0,
      summary: {
        count: 3,
        t_span_us: 2000000,
        axes: [
          { min: -0.02, max: 0.03, mean: 0.0033 },
          { min: -0.02, max: 0.01, mean: -0.0067 },
          { min: 9.8, max: 9.82, mean: 9.81 },
        ],
      },
      samples: [
        [0, 0.01, -0.02, 9.81],
        [500000, 0.02, -0.01, 9.8],
        [2000000, -0.02, 0.01, 9.82],
      ],
    },
  },
  raw_events_ref: "events.getevent",
  attachments: {
    "screenshot-000.png": "image/png",
    "screenshot-001.png": "image/png",
    "ui-dump-000.xml": "application/xml",
    "ui-dump-001.xml": "application/xml",
    "ui-dump-002.xml": "application/xml",
    "events.getevent": "text/plain; charset=utf-8",
    "sensor-accelerometer.png": "image/png",
  },
};

export const LISTING: ReportListEntry[] = [
  {
    id: "27bf757b690056b9",
    title: "list row vanishes",
    created_at: "2026-08-01T10:00:00Z",
    step_count: 3,
  },
  {
    id: "aaaa111122223333",
    title: "",
    created_at: "2026-07-30T08:00:00Z",
    step_count: 1,
  },
];

export function jsonResponse(body: unknown, status = 200, headers: Record<string, string> = {}) {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json", ...headers },
  });
}
