"""Sensor-trace line charts for report bundles, rendered byte-deterministically.

Figures are plain PNG attachments named `sensor-<kind>.png`; rendering strips
the library's version stamp so identical traces produce identical bytes.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be pinned first


def figure_attachment_name(kind: str) -> str:
    return f"sensor-{kind}.png"


def render_trace_figure(trace_doc: dict) -> bytes:
    """Plot one serialized trace: each value axis against session time."""
    samples = trace_doc.get("samples") or []
    if not samples:
        raise ValueError("cannot render an empty sensor trace")
    times = [row[0] / 1_000_000 for row in samples]
    arity = len(samples[0]) - 1

    fig, ax = plt.subplots(figsize=(6.4, 2.8), dpi=100)
    try:
        for axis in range(arity):
            ax.plot(times, [row[axis + 1] for row in samples], label=f"axis {axis}", linewidth=1.2)
        ax.set_title(trace_doc.get("kind", ""))
        ax.set_xlabel("session time (s)")
        ax.set_ylabel(trace_doc.get("unit", ""))
        ax.grid(True, linewidth=0.3)
        if arity > 1:
            ax.legend(loc="upper right", fontsize="small")
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="png", metadata={"Software": None})
        return buf.getvalue()
    finally:
        plt.close(fig)


def render_all_figures(sensor_traces: dict[str, dict]) -> dict[str, bytes]:
    """One figure per non-empty trace, keyed by attachment name."""
    figures = {}
    for kind in sorted(sensor_traces):
        if sensor_traces[kind].get("samples"):
            figures[figure_attachment_name(kind)] = render_trace_figure(sensor_traces[kind])
    return figures
