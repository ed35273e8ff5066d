"""Chain statistics: acceptance rate, lag-1 correlation, normalized histogram."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .samplers import ChainTrace

# bit-exact header contract for the benchmark CSV
CSV_HEADER = "sampler,weights,N,runs,accept_mean,accept_se,corr_mean,corr_se,seed"

# explicit marker for an undefined (zero-variance) correlation; never 0
UNDEFINED_CORRELATION = None


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    densities: np.ndarray
    n_in_range: int
    n_below: int
    n_above: int


@dataclass(frozen=True)
class DiagnosticsReport:
    acceptance_rate: float
    lag1_corr: float | None
    histogram: Histogram | None
    n_samples: int
    n_runs: int = 1


@dataclass(frozen=True)
class MetricSummary:
    label: str
    n_runs: int
    accept_mean: float
    accept_se: float
    corr_mean: float
    corr_se: float


def acceptance_rate(trace: ChainTrace) -> float:
    if len(trace) == 0:
        raise ValueError("empty trace")
    return float(np.mean(trace.accept_flags))


def _states_1d(trace) -> np.ndarray:
    s = trace.states if isinstance(trace, ChainTrace) else np.asarray(trace)
    return np.asarray(s, dtype=float).reshape(len(s), -1)[:, 0]


def lag1_correlation(trace) -> float | None:
    """Pearson correlation of consecutive states; None if variance is zero.

    A constant chain is diagnostic signal (a stuck sampler), so the
    undefined case is an explicit marker rather than a silent 0.
    """
    s = _states_1d(trace)
    if len(s) < 3:
        raise ValueError("need at least 3 states")
    a, b = s[:-1], s[1:]
    va = a.std()
    vb = b.std()
    if va == 0.0 or vb == 0.0:
        return UNDEFINED_CORRELATION
    return float(np.corrcoef(a, b)[0, 1])


def normalized_histogram(trace, bins: int, value_range: tuple) -> Histogram:
    """Density-normalized histogram; out-of-range samples tallied separately."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    lo, hi = float(value_range[0]), float(value_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError("range must be finite with lo < hi")
    s = _states_1d(trace)
    below = int((s < lo).sum())
    above = int((s > hi).sum())
    inside = s[(s >= lo) & (s <= hi)]
    counts, edges = np.histogram(inside, bins=bins, range=(lo, hi))
    widths = np.diff(edges)
    n = counts.sum()
    dens = counts / (n * widths) if n > 0 else np.zeros(bins)
    return Histogram(edges, dens, int(n), below, above)


def averaged_metrics(configs: Sequence[tuple[str, Callable[[int], ChainTrace]]],
                     n_runs: int, base_seed: int) -> list[MetricSummary]:
    """Replicate each labelled chain factory over derived seeds.

    Seeds are base_seed + replica index; the standard error is the sample
    standard deviation of the per-run metric divided by sqrt(n_runs).
    Undefined per-run correlations are excluded from the correlation
    average.
    """
    if n_runs < 2:
        raise ValueError("n_runs must be >= 2")
    out = []
    for label, factory in configs:
        accs = np.empty(n_runs)
        corrs = []
        for r in range(n_runs):
            trace = factory(base_seed + r)
            accs[r] = acceptance_rate(trace)
            rho = lag1_correlation(trace)
            if rho is not None:
                corrs.append(rho)
        corrs = np.asarray(corrs, dtype=float)
        out.append(MetricSummary(
            label, n_runs,
            float(accs.mean()), _standard_error(accs),
            float(corrs.mean()) if corrs.size else math.nan,
            _standard_error(corrs) if corrs.size else math.nan))
    return out


def _standard_error(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))
