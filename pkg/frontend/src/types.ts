// Shapes of the documents the report service serves. Unknown extra fields
// are preserved by the service, so every interface stays open.

export interface ReportListEntry {
  id: string;
  title: string;
  created_at: string;
  step_count: number;
}

export interface ComponentSummary {
  class_name: string | null;
  resource_id: string | null;
  text: string | null;
  clickable: boolean | null;
  bounds: string | null;
  [extra: string]: unknown;
}

export interface ReportStep {
  index: number;
  kind: string;
  description: string;
  start_time_us: number;
  end_time_us: number;
  duration_ms: number;
  start_point: [number, number] | null;
  end_point: [number, number] | null;
  finger_count: number | null;
  key_code: number | null;
  key_name: string | null;
  target: ComponentSummary | null;
  clickable_ancestor: ComponentSummary | null;
  screenshot_ref: string | null;
  ui_dump_ref: string | null;
  [extra: string]: unknown;
}

export interface AxisSummary {
  min: number;
  max: number;
  mean: number;
}

export interface SensorTraceDoc {
  kind: string;
  unit: string;
  min_interval_ms: number;
  out_of_order: number;
  below_floor: number;
  summary: { count: number; t_span_us?: number; axes?: AxisSummary[] };
  samples: number[][];
}

export interface ReportDocument {
  id: string;
  schema_version: number;
  title: string;
  expected_behavior: string;
  actual_behavior: string;
  app_package: string;
  device_info: Record<string, unknown>;
  created_at: string;
  hit_policy: string;
  steps: ReportStep[];
  sensor_traces: Record<string, SensorTraceDoc>;
  raw_events_ref: string | null;
  attachments: Record<string, string>;
  [extra: string]: unknown;
}

export interface AnnotationPatch {
  title?: string;
  expected_behavior?: string;
  actual_behavior?: string;
}
