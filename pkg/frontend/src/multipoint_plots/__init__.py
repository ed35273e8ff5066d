"""Presentation-only charts for the multipoint benchmark CSV artifacts."""

from .plots import (
    PlotError,
    plot_histogram_overlay,
    plot_metric_vs_n,
    read_metrics_csv,
    read_trace_csv,
    target_curve,
)

__version__ = "0.1.0"
