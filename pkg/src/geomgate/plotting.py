"""SVG overlay plots for result tables: one line per scheme."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import ResultTable

_AXIS_LABELS = {
    "epsilon": "coupling error fraction",
    "delta": "detuning error fraction",
    "gamma-rate": "decoherence rate / peak coupling",
    "time": "evolution time fraction",
}


def plot_table(table: ResultTable, path) -> Path:
    """Render the table as an SVG with one polyline per (scheme, gate)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    series = {}
    for row in table.rows:
        key = row.scheme if _single_gate(table) else f"{row.scheme} ({row.gate})"
        series.setdefault(key, []).append((row.noise_value, row.value))
    for label in sorted(series):
        pts = np.array(series[label], dtype=float)
        order = np.argsort(pts[:, 0])
        ax.plot(pts[order, 0], pts[order, 1], marker=".", label=label)
    axis = table.rows[0].noise_axis if table.rows else ""
    metric = table.rows[0].metric if table.rows else ""
    ax.set_xlabel(_AXIS_LABELS.get(axis, axis))
    ax.set_ylabel(metric)
    title = table.metadata.get("experiment", "")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def _single_gate(table: ResultTable) -> bool:
    return len({row.gate for row in table.rows}) <= 1
