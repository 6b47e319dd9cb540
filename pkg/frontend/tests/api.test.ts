import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, ReportsClient, RevisionConflict } from "../src/api.js";
import { jsonResponse, LISTING, THREE_STEP_DOC } from "./fixtures.js";

afterEach(() => {
  vi.unstubAllGlobals();
});

function stubFetch(handler: (url: string, init?: RequestInit) => Response | Promise<Response>) {
  const mock = vi.fn(handler);
  vi.stubGlobal("fetch", mock);
  return mock;
}

describe("listReports", () => {
  it("fetches and returns the listing", async () => {
    const mock = stubFetch(() => jsonResponse(LISTING));
    const got = await new ReportsClient().listReports();
    expect(got).toEqual(LISTING);
    expect(mock).toHaveBeenCalledWith("/reports");
  });

  it("prefixes a configured base url", async () => {
    const mock = stubFetch(() => jsonResponse([]));
    await new ReportsClient("http://127.0.0.1:8477").listReports();
    expect(mock).toHaveBeenCalledWith("http://127.0.0.1:8477/reports");
  });
});

describe("getReport", () => {
  it("returns the document and the ETag revision", async () => {
    stubFetch(() => jsonResponse(THREE_STEP_DOC, 200, { ETag: "3" }));
    const { doc, revision } = await new ReportsClient().getReport(THREE_STEP_DOC.id);
    expect(doc.steps).toHaveLength(3);
    expect(revision).toBe(3);
  });

  it("accepts quoted ETags", async () => {
    stubFetch(() => jsonResponse(THREE_STEP_DOC, 200, { ETag: '"7"' }));
    const { revision } = await new ReportsClient().getReport(THREE_STEP_DOC.id);
    expect(revision).toBe(7);
  });

  it("missing reports raise ApiError with the status", async () => {
    stubFetch(() => jsonResponse({ error: "no report" }, 404));
    await expect(new ReportsClient().getReport("nope")).rejects.toMatchObject({
      name: "ApiError",
      status: 404,
    });
  });
});

describe("patchAnnotations", () => {
  it("sends If-Match and returns the new revision", async () => {
    const mock = stubFetch(() => jsonResponse({ id: "x", revision: 2 }));
    const { revision } = await new ReportsClient().patchAnnotations(
      "x",
      { title: "renamed" },
      1,
    );
    expect(revision).toBe(2);
    const [url, init] = mock.mock.calls[0];
    expect(url).toBe("/reports/x/annotations");
    expect(init?.method).toBe("PATCH");
    expect((init?.headers as Record<string, string>)["If-Match"]).toBe("1");
    expect(JSON.parse(String(init?.body))).toEqual({ title: "renamed" });
  });

  it("omits If-Match when no revision is supplied", async () => {
    const mock = stubFetch(() => jsonResponse({ id: "x", revision: 2 }));
    await new ReportsClient().patchAnnotations("x", { title: "t" });
    const [, init] = mock.mock.calls[0];
    expect((init?.headers as Record<string, string>)["If-Match"]).toBeUndefined();
  });

  it("a stale revision raises RevisionConflict carrying the current one", async () => {
    stubFetch(() => jsonResponse({ error: "stale", current_revision: 5 }, 409));
    const attempt = new ReportsClient().patchAnnotations("x", { title: "t" }, 1);
    await expect(attempt).rejects.toBeInstanceOf(RevisionConflict);
    await expect(
      new ReportsClient().patchAnnotations("x", { title: "t" }, 1),
    ).rejects.toMatchObject({ currentRevision: 5 });
  });

  it("validation rejections surface the violations", async () => {
    stubFetch(() => jsonResponse({ violations: ["annotation title must be a string"] }, 422));
    try {
      await new ReportsClient().patchAnnotations("x", { title: "t" }, 1);
      expect.unreachable("should have thrown");
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).violations).toEqual(["annotation title must be a string"]);
    }
  });
});

describe("asset urls", () => {
  it("builds attachment and replay urls with encoding", () => {
    const client = new ReportsClient("http://h");
    expect(client.attachmentUrl("id1", "screenshot-000.png")).toBe(
      "http://h/reports/id1/attachments/screenshot-000.png",
    );
    expect(client.attachmentUrl("id1", "a b.png")).toBe(
      "http://h/reports/id1/attachments/a%20b.png",
    );
    expect(client.replayUrl("id1", "adb")).toBe("http://h/reports/id1/replay/adb");
  });
});
