"""Chart builders over the benchmark CSV schemas.

This package only *reads* CSVs produced by the sampling harness; it never
recomputes chain statistics.  Output is deterministic: fixed style, fixed
SVG hash salt, and no timestamps in image metadata.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["svg.hashsalt"] = "multipoint-plots"

METRIC_COLUMNS = ("sampler", "weights", "N", "runs", "accept_mean",
                  "accept_se", "corr_mean", "corr_se", "seed")

MARKERS = ("o", "s", "^", "v", "D", "P", "X", "*")

# builtin target curves, keyed by the harness target id
TARGETS = {
    "bimodal-quartic": lambda x: np.exp(-((x * x - 4.0) ** 2) / 4.0),
}


class PlotError(Exception):
    """Bad input for a chart: missing column, empty trace, unknown target."""


def read_metrics_csv(path) -> list[dict]:
    """Rows of a benchmark metrics CSV, with numeric fields converted."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in METRIC_COLUMNS if c not in header]
        if missing:
            raise PlotError(f"missing column(s) in {path}: "
                            + ", ".join(missing))
        rows = []
        for row in reader:
            row["N"] = int(row["N"])
            for col in ("accept_mean", "accept_se", "corr_mean", "corr_se"):
                row[col] = float(row[col])
            rows.append(row)
    if not rows:
        raise PlotError(f"no data rows in {path}")
    return rows


def read_trace_csv(path) -> np.ndarray:
    """The ``state`` column of a single-chain trace CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or "state" not in reader.fieldnames:
            raise PlotError(f"missing column(s) in {path}: state")
        states = np.array([float(row["state"]) for row in reader])
    if states.size == 0:
        raise PlotError(f"empty trace in {path}")
    return states


def group_series(rows: list[dict], metric: str) -> dict:
    """(sampler, weights) -> (N, mean, se) arrays sorted by N."""
    se_col = {"accept_mean": "accept_se", "corr_mean": "corr_se"}[metric]
    series = {}
    for row in rows:
        key = (row["sampler"], row["weights"])
        series.setdefault(key, []).append(
            (row["N"], row[metric], row[se_col]))
    out = {}
    for key, pts in series.items():
        pts.sort()
        n, mean, se = zip(*pts)
        out[key] = (np.array(n), np.array(mean), np.array(se))
    return out


def _save(fig, out_base) -> list[Path]:
    out_base = Path(out_base)
    out_base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for ext, meta in (("png", {"Software": "multipoint-plots"}),
                      ("svg", {"Date": None})):
        path = out_base.with_suffix(f".{ext}")
        fig.savefig(path, metadata=meta)
        written.append(path)
    plt.close(fig)
    return written


def plot_metric_vs_n(csv_path, out_base, metric: str = "corr_mean",
                     log_n: bool = False):
    """One errorbar series per (sampler, weights) group of the metrics CSV.

    Returns (written file paths, the plotted series dict).
    """
    if metric not in ("accept_mean", "corr_mean"):
        raise PlotError(f"unknown metric column {metric!r}")
    rows = read_metrics_csv(csv_path)
    series = group_series(rows, metric)
    fig, ax = plt.subplots(figsize=(7, 5))
    for i, (key, (n, mean, se)) in enumerate(sorted(series.items())):
        label = f"{key[0]} / {key[1]}"
        style = "-" if len(n) > 1 else "none"
        ax.errorbar(n, mean, yerr=se, marker=MARKERS[i % len(MARKERS)],
                    linestyle=style, capsize=3, label=label)
    if log_n:
        ax.set_xscale("log")
    ax.set_xlabel("number of tries N")
    ax.set_ylabel({"accept_mean": "mean acceptance rate",
                   "corr_mean": "mean lag-1 correlation"}[metric])
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    return _save(fig, out_base), series


def target_curve(target_id: str, value_range, points: int = 2001):
    """Quadrature-normalized density curve of a builtin target."""
    try:
        f = TARGETS[target_id]
    except KeyError:
        raise PlotError(f"unknown target id {target_id!r}") from None
    lo, hi = float(value_range[0]), float(value_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise PlotError("range must be finite with lo < hi")
    xs = np.linspace(lo, hi, points)
    ys = f(xs)
    return xs, ys / np.trapezoid(ys, xs)


def plot_histogram_overlay(trace_csv, out_base,
                           target_id: str = "bimodal-quartic",
                           bins: int = 100, value_range=(-4.0, 4.0)):
    """Normalized histogram of a trace with the target curve overlaid.

    ``trace_csv=None`` draws the curve alone.  Returns
    (written file paths, bin edges, bin densities) — edges/densities are
    None in curve-only mode.
    """
    xs, curve = target_curve(target_id, value_range)
    fig, ax = plt.subplots(figsize=(7, 5))
    edges = densities = None
    if trace_csv is not None:
        states = read_trace_csv(trace_csv)
        inside = states[(states >= value_range[0])
                        & (states <= value_range[1])]
        if inside.size == 0:
            plt.close(fig)
            raise PlotError("no trace samples inside the plotting range")
        counts, edges = np.histogram(inside, bins=bins, range=value_range)
        densities = counts / (counts.sum() * np.diff(edges))
        ax.bar(edges[:-1], densities, width=np.diff(edges), align="edge",
               alpha=0.6, label="samples")
    ax.plot(xs, curve, "k-", linewidth=1.5, label="target density")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.legend(fontsize=8)
    return _save(fig, out_base), edges, densities
