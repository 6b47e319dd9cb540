// Typed client for the report service. Revisions ride on ETag / If-Match;
// a stale write surfaces as RevisionConflict carrying the server's current
// revision so the caller can reload and retry.

import type { AnnotationPatch, ReportDocument, ReportListEntry } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly violations: string[] = [],
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class RevisionConflict extends Error {
  constructor(
    message: string,
    readonly currentRevision: number,
  ) {
    super(message);
    this.name = "RevisionConflict";
  }
}

function parseRevision(header: string | null): number {
  if (header === null) return 0;
  const bare = header.replace(/"/g, "").trim();
  const revision = Number.parseInt(bare, 10);
  return Number.isNaN(revision) ? 0 : revision;
}

async function errorFrom(response: Response): Promise<ApiError> {
  let violations: string[] = [];
  let detail = "";
  try {
    const body = await response.json();
    if (Array.isArray(body.violations)) violations = body.violations.map(String);
    if (typeof body.error === "string") detail = body.error;
  } catch {
    // non-JSON error body; the status line is all we have
  }
  const suffix = detail || violations.join("; ");
  return new ApiError(
    suffix ? `request failed (${response.status}): ${suffix}` : `request failed (${response.status})`,
    response.status,
    violations,
  );
}

export class ReportsClient {
  constructor(private readonly base: string = "") {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async listReports(): Promise<ReportListEntry[]> {
    const response = await fetch(this.url("/reports"));
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as ReportListEntry[];
  }

  async getReport(id: string): Promise<{ doc: ReportDocument; revision: number }> {
    const response = await fetch(this.url(`/reports/${encodeURIComponent(id)}`));
    if (!response.ok) throw await errorFrom(response);
    const doc = (await response.json()) as ReportDocument;
    return { doc, revision: parseRevision(response.headers.get("etag")) };
  }

  async patchAnnotations(
    id: string,
    patch: AnnotationPatch,
    revision?: number,
  ): Promise<{ revision: number }> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (revision !== undefined) headers["If-Match"] = String(revision);
    const response = await fetch(this.url(`/reports/${encodeURIComponent(id)}/annotations`), {
      method: "PATCH",
      headers,
      body: JSON.stringify(patch),
    });
    if (response.status === 409) {
      const body = await response.json();
      throw new RevisionConflict(
        typeof body.error === "string" ? body.error : "revision conflict",
        typeof body.current_revision === "number" ? body.current_revision : 0,
      );
    }
    if (!response.ok) throw await errorFrom(response);
    const body = await response.json();
    return { revision: typeof body.revision === "number" ? body.revision : 0 };
  }

  attachmentUrl(id: string, name: string): string {
    return this.url(`/reports/${encodeURIComponent(id)}/attachments/${encodeURIComponent(name)}`);
  }

  replayUrl(id: string, flavor: "sendevent" | "adb"): string {
    return this.url(`/reports/${encodeURIComponent(id)}/replay/${flavor}`);
  }
}
