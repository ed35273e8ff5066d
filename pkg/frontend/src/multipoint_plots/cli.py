"""Standalone entry point; also the delegate behind ``multipoint plot-data``."""

from __future__ import annotations

import argparse
import sys

from .plots import PlotError, plot_histogram_overlay, plot_metric_vs_n

KINDS = ("metric-vs-n", "histogram-overlay")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="multipoint-plots",
        description="Render benchmark CSVs as charts (PNG and SVG)")
    p.add_argument("--csv", required=True,
                   help="metrics CSV (metric-vs-n) or trace CSV "
                        "(histogram-overlay); 'none' for a curve-only overlay")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--out", required=True,
                   help="output path; extension is replaced by .png/.svg")
    p.add_argument("--metric", default="corr_mean",
                   choices=("corr_mean", "accept_mean"))
    p.add_argument("--log-n", action="store_true",
                   help="logarithmic N axis for metric-vs-n")
    p.add_argument("--target", default="bimodal-quartic")
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--range", default="-4,4",
                   help="comma-separated histogram range, e.g. -4,4")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.kind == "metric-vs-n":
            written, _ = plot_metric_vs_n(args.csv, args.out,
                                          metric=args.metric,
                                          log_n=args.log_n)
        else:
            lo, hi = (float(v) for v in args.range.split(","))
            trace = None if args.csv == "none" else args.csv
            written, _, _ = plot_histogram_overlay(
                trace, args.out, target_id=args.target, bins=args.bins,
                value_range=(lo, hi))
    except (PlotError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
