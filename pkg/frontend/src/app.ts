// DOM bootstrap: routes the hash to a view, renders, and wires the handlers.
// All HTML comes from render.ts; all data comes from api.ts.

import { ReportsClient } from "./api.js";
import { saveAnnotations } from "./controller.js";
import {
  renderConflictBanner,
  renderError,
  renderListView,
  renderReportView,
  type ReportUrls,
} from "./render.js";
import { formatRoute, parseHash, type Route } from "./router.js";
import type { AnnotationPatch, ReportDocument } from "./types.js";

interface Loaded {
  doc: ReportDocument;
  revision: number;
}

export class App {
  private loaded: Loaded | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ReportsClient = new ReportsClient(),
  ) {}

  start(): void {
    window.addEventListener("hashchange", () => {
      void this.show();
    });
    void this.show();
  }

  private urls(id: string): ReportUrls {
    return {
      attachment: (name) => this.client.attachmentUrl(id, name),
      replay: (flavor) => this.client.replayUrl(id, flavor),
    };
  }

  async show(): Promise<void> {
    const route = parseHash(window.location.hash);
    try {
      if (route.view === "list") {
        this.loaded = null;
        this.root.innerHTML = renderListView(await this.client.listReports());
        return;
      }
      if (this.loaded === null || this.loaded.doc.id !== route.id) {
        this.loaded = await this.client.getReport(route.id);
      }
      this.renderReport(route);
    } catch (error) {
      this.root.innerHTML = renderError(error instanceof Error ? error.message : String(error));
    }
  }

  private renderReport(route: Route & { view: "report" }): void {
    const loaded = this.loaded;
    if (loaded === null) return;
    this.root.innerHTML = renderReportView(loaded.doc, route.step, this.urls(route.id));
    this.wireStepNav(route);
    this.wireAnnotations(route);
  }

  private wireStepNav(route: Route & { view: "report" }): void {
    const go = (step: number) => {
      window.location.hash = formatRoute({ view: "report", id: route.id, step });
    };
    this.button("prev-step")?.addEventListener("click", () => go(Math.max(route.step - 1, 0)));
    this.button("next-step")?.addEventListener("click", () => {
      const last = (this.loaded?.doc.steps.length ?? 1) - 1;
      go(Math.min(route.step + 1, last));
    });
  }

  private wireAnnotations(route: Route & { view: "report" }): void {
    const form = this.root.querySelector<HTMLFormElement>('[data-role="annotations"]');
    if (form === null) return;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitAnnotations(route, form);
    });
  }

  private formPatch(form: HTMLFormElement): AnnotationPatch {
    const data = new FormData(form);
    return {
      title: String(data.get("title") ?? ""),
      expected_behavior: String(data.get("expected_behavior") ?? ""),
      actual_behavior: String(data.get("actual_behavior") ?? ""),
    };
  }

  private async submitAnnotations(
    route: Route & { view: "report" },
    form: HTMLFormElement,
  ): Promise<void> {
    const loaded = this.loaded;
    if (loaded === null) return;
    const patch = this.formPatch(form);
    const saved = await saveAnnotations(this.client, route.id, loaded.revision, patch);
    const slot = form.querySelector<HTMLElement>('[data-role="banner-slot"]');
    const state = form.querySelector<HTMLElement>('[data-role="save-state"]');
    if (saved.ok) {
      this.loaded = {
        doc: { ...loaded.doc, ...patch },
        revision: saved.revision,
      };
      this.renderReport(route);
      const savedState = this.root.querySelector<HTMLElement>('[data-role="save-state"]');
      if (savedState !== null) savedState.textContent = `saved (revision ${saved.revision})`;
      return;
    }
    if (slot !== null) slot.innerHTML = renderConflictBanner(saved.currentRevision);
    if (state !== null) state.textContent = "";
    this.root
      .querySelector<HTMLButtonElement>('[data-action="reload-latest"]')
      ?.addEventListener("click", () => {
        void this.reloadKeepingEdits(route, patch);
      });
  }

  private async reloadKeepingEdits(
    route: Route & { view: "report" },
    edits: AnnotationPatch,
  ): Promise<void> {
    this.loaded = await this.client.getReport(route.id);
    this.renderReport(route);
    const form = this.root.querySelector<HTMLFormElement>('[data-role="annotations"]');
    if (form === null) return;
    (form.elements.namedItem("title") as HTMLInputElement).value = edits.title ?? "";
    (form.elements.namedItem("expected_behavior") as HTMLTextAreaElement).value =
      edits.expected_behavior ?? "";
    (form.elements.namedItem("actual_behavior") as HTMLTextAreaElement).value =
      edits.actual_behavior ?? "";
  }

  private button(action: string): HTMLButtonElement | null {
    return this.root.querySelector<HTMLButtonElement>(`[data-action="${action}"]`);
  }
}

const mount = typeof document === "undefined" ? null : document.getElementById("app");
if (mount !== null) {
  new App(mount).start();
}
