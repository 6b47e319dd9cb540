// Hash routes so any list row, report, or step can be linked and restored
// cold: "#/" (list), "#/reports/<id>", "#/reports/<id>/steps/<n>".

export type Route = { view: "list" } | { view: "report"; id: string; step: number };

export function parseHash(hash: string): Route {
  const parts = hash.replace(/^#\/?/, "").split("/").filter((p) => p.length > 0);
  if (parts[0] !== "reports" || parts.length < 2) return { view: "list" };
  const id = decodeURIComponent(parts[1]);
  let step = 0;
  if (parts[2] === "steps" && parts.length >= 4) {
    const parsed = Number.parseInt(parts[3], 10);
    if (Number.isInteger(parsed) && parsed >= 0) step = parsed;
  }
  return { view: "report", id, step };
}

export function formatRoute(route: Route): string {
  if (route.view === "list") return "#/";
  const base = `#/reports/${encodeURIComponent(route.id)}`;
  return route.step > 0 ? `${base}/steps/${route.step}` : base;
}
