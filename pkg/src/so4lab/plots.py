"""Figure rendering for report commands (PNG files next to the data)."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["render_report_figure"]


def render_report_figure(report, path: str, title: str) -> None:
    """Residuals vs tolerances on a log axis, one bar per report entry.

    Entries whose value is zero are drawn at the plot floor; the sense of
    each comparison is left to the pass/fail coloring so inverted entries
    (thresholds that are minima) remain readable.
    """
    entries = report.entries
    labels = [e.label for e in entries]
    values = np.array([abs(e.value) for e in entries], dtype=float)
    tols = np.array([abs(e.tolerance) for e in entries], dtype=float)
    colors = ["#2a7e43" if e.passed else "#b03030" for e in entries]

    floor = 1e-18
    vplot = np.maximum(values, floor)
    tplot = np.maximum(tols, floor)

    fig_h = max(3.0, 0.34 * len(entries) + 1.4)
    fig, ax = plt.subplots(figsize=(9.0, fig_h))
    ypos = np.arange(len(entries))[::-1]
    ax.barh(ypos, vplot, color=colors, height=0.6, log=True)
    ax.plot(tplot, ypos, linestyle="none", marker="|", markersize=12, color="black", label="tolerance")
    ax.set_yticks(ypos)
    ax.set_yticklabels(labels, fontsize=7, family="monospace")
    ax.set_xscale("log")
    ax.set_xlabel("measured value (log scale)")
    ax.set_title(title, fontsize=10)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
