"""File-only figure rendering for experiment reports.

The Agg backend is forced before pyplot loads so rendering works headless;
nothing here ever opens a window.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import InvalidParameterError
from .metrics import ScalingReport


def save_scaling_figure(report: ScalingReport, path) -> None:
    """Log-log plot of the per-size statistic, its power-law fit, and the
    reference curve (rescaled to the first data point) when present."""
    sizes = np.array(report.sizes, dtype=np.float64)
    stats = np.array(report.statistics, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    try:
        ax.loglog(sizes, stats, "o", label="measured")
        fit = math.exp(report.intercept) * sizes**report.slope
        ax.loglog(sizes, fit, "-", label=f"fit, slope {report.slope:.3f}")
        if report.reference is not None:
            ref = np.array(report.reference, dtype=np.float64)
            ref = ref * (stats[0] / ref[0])
            label = "reference"
            if report.reference_slope is not None:
                label = f"reference, slope {report.reference_slope:.3f}"
            ax.loglog(sizes, ref, "--", label=label)
        ax.set_xlabel("nodes")
        ax.set_ylabel("time statistic")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
    finally:
        plt.close(fig)


def save_time_histogram(times, path, bins: int = 30) -> None:
    """Histogram of per-trial completion times."""
    data = [float(t) for t in times if math.isfinite(t)]
    if not data:
        raise InvalidParameterError("no finite times to plot")
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    try:
        ax.hist(data, bins=bins, color="#4878a8", edgecolor="white")
        ax.set_xlabel("completion time")
        ax.set_ylabel("trials")
        fig.tight_layout()
        fig.savefig(path, dpi=120)
    finally:
        plt.close(fig)
