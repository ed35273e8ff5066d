"""Numeric foundation: target/proposal interfaces and log-domain utilities.

All density arithmetic lives in log space.  -inf is a legal log density
(zero mass); NaN and +inf are never legal and raise ``NumericError``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

NEG_INF = float("-inf")

State = Any  # scalar or fixed-dimension vector; targets/proposals own the type


class MultipointError(Exception):
    """Base class for library errors."""


class NumericError(MultipointError):
    """A density or weight evaluation produced NaN or +inf."""


class DegenerateWeightsError(MultipointError):
    """Every log weight is -inf; no candidate can be selected."""


class UnboundedWeightError(MultipointError):
    """A weight evaluation violates the boundedness contract."""


class ConfigurationError(MultipointError):
    """Invalid sampler or experiment configuration."""


def _checked_log(value: float, what: str) -> float:
    v = float(value)
    if math.isnan(v) or v == math.inf:
        raise NumericError(f"{what} returned {v}")
    return v


@dataclass(frozen=True)
class TargetDensity:
    """Unnormalized log target density.

    ``log_density(x)`` must be deterministic and return a finite float or
    -inf (zero density outside the support).
    """

    log_density: Callable[[State], float]
    name: str = "target"

    def eval_log(self, x: State) -> float:
        return _checked_log(self.log_density(x), f"log target {self.name!r}")

    def scaled(self, log_c: float) -> "TargetDensity":
        """Target with density multiplied by exp(log_c); used by invariance tests."""
        base = self.log_density
        return TargetDensity(lambda x: base(x) + log_c, name=f"{self.name}*c")


class ProposalSequence:
    """Ordered family of conditional proposals.

    ``sample(j, x, earlier, rng)`` draws the j-th point (1-based) given the
    previous chain state ``x`` and the ``j - 1`` points drawn earlier in the
    same step.  ``eval_log(j, y, x, earlier)`` evaluates the corresponding
    conditional log density.

    The shipped families derive all distribution parameters from the
    conditioning values ``(x, earlier)``, so they remain well defined when a
    weight function evaluates them at an index or conditioning length other
    than the generative one.
    """

    length: int | None = None  # None: defined for every index

    def sample(self, j: int, x: State, earlier: Sequence[State], rng) -> State:
        raise NotImplementedError

    def eval_log(self, j: int, y: State, x: State, earlier: Sequence[State]) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class FunctionProposalSequence(ProposalSequence):
    """Proposal sequence built from plain callables."""

    sample_fn: Callable[[int, State, Sequence[State], Any], State] = None
    eval_log_fn: Callable[[int, State, State, Sequence[State]], float] = None
    length: int | None = None

    def sample(self, j, x, earlier, rng):
        return self.sample_fn(j, x, earlier, rng)

    def eval_log(self, j, y, x, earlier):
        return _checked_log(self.eval_log_fn(j, y, x, earlier), f"proposal {j}")


@dataclass(frozen=True)
class SharedProposal(ProposalSequence):
    """Identical proposal at every index, conditioned only on the chain state.

    This is the i.i.d.-candidate setting: earlier within-step points are
    ignored.
    """

    sample_fn: Callable[[State, Any], State] = None
    eval_log_fn: Callable[[State, State], float] = None
    length: int | None = None

    def sample(self, j, x, earlier, rng):
        return self.sample_fn(x, rng)

    def eval_log(self, j, y, x, earlier):
        return _checked_log(self.eval_log_fn(y, x), "shared proposal")


@dataclass(frozen=True)
class PointSet:
    """Ordered states with an orientation marker (forward vs reversed)."""

    items: tuple
    orientation: str = "forward"  # "forward" or "reversed"

    def __post_init__(self):
        if self.orientation not in ("forward", "reversed"):
            raise ValueError(f"bad orientation {self.orientation!r}")
        object.__setattr__(self, "items", tuple(self.items))

    def __len__(self):
        return len(self.items)

    def reverse(self) -> "PointSet":
        flipped = "reversed" if self.orientation == "forward" else "forward"
        return PointSet(tuple(reversed(self.items)), flipped)

    def forward_items(self) -> tuple:
        if self.orientation == "forward":
            return self.items
        return tuple(reversed(self.items))


def _as_forward(ys) -> tuple:
    if isinstance(ys, PointSet):
        return ys.forward_items()
    return tuple(ys)


def log_joint_proposal(props: ProposalSequence, x: State, ys, k: int) -> float:
    """log q_k(y_{1:k} | x): sequential product of the first k conditionals."""
    points = _as_forward(ys)
    if k < 1 or (props.length is not None and k > props.length):
        raise ValueError(f"k={k} out of range for proposal sequence")
    if len(points) < k:
        raise ValueError(f"need at least {k} points, got {len(points)}")
    total = 0.0
    for j in range(1, k + 1):
        total += props.eval_log(j, points[j - 1], x, points[: j - 1])
    return _checked_log(total, "log joint proposal")


def log_sum_exp(logw: Sequence[float]) -> float:
    """Max-shifted log of the sum of exponentials; -inf for an all--inf input."""
    arr = np.asarray(logw, dtype=float)
    if arr.size == 0:
        raise ValueError("empty log-weight list")
    if np.isnan(arr).any() or np.isposinf(arr).any():
        raise NumericError("NaN or +inf among log weights")
    m = arr.max()
    if m == NEG_INF:
        return NEG_INF
    return float(m + np.log(np.exp(arr - m).sum()))


def normalize_log_weights(logw: Sequence[float]) -> np.ndarray:
    """Probabilities proportional to exp(logw), computed via max shift."""
    arr = np.asarray(logw, dtype=float)
    if arr.size == 0:
        raise ValueError("empty log-weight list")
    if np.isnan(arr).any() or np.isposinf(arr).any():
        raise NumericError("NaN or +inf among log weights")
    m = arr.max()
    if m == NEG_INF:
        raise DegenerateWeightsError("all log weights are -inf")
    w = np.exp(arr - m)
    return w / w.sum()


def sample_categorical(probs: Sequence[float], u: float) -> int:
    """Inverse-CDF draw: smallest index whose cumulative probability exceeds u."""
    p = np.asarray(probs, dtype=float)
    if p.size == 0:
        raise ValueError("empty probability vector")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()}, not 1")
    idx = int(np.searchsorted(np.cumsum(p), u, side="right"))
    return min(idx, p.size - 1)
