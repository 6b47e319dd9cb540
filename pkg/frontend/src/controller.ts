// Annotation save flow, kept DOM-free so the optimistic-concurrency paths
// are testable: a stale revision comes back as a conflict result instead of
// an exception, and the caller decides how to surface it.

import { ReportsClient, RevisionConflict } from "./api.js";
import type { AnnotationPatch } from "./types.js";

export type SaveResult =
  | { ok: true; revision: number }
  | { ok: false; currentRevision: number; message: string };

export async function saveAnnotations(
  client: ReportsClient,
  id: string,
  revision: number,
  patch: AnnotationPatch,
): Promise<SaveResult> {
  try {
    const { revision: next } = await client.patchAnnotations(id, patch, revision);
    return { ok: true, revision: next };
  } catch (error) {
    if (error instanceof RevisionConflict) {
      return { ok: false, currentRevision: error.currentRevision, message: error.message };
    }
    throw error;
  }
}
