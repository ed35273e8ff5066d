"""Builtin target and proposal families used by the benchmark harness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    ConfigurationError,
    ProposalSequence,
    SharedProposal,
    TargetDensity,
)

_LOG_2PI = math.log(2.0 * math.pi)


def bimodal_quartic_log(x: float) -> float:
    """log p(x) = -(x^2 - 4)^2 / 4: two modes at +-2, deep valley at 0."""
    x = float(x)
    return -((x * x - 4.0) ** 2) / 4.0


BIMODAL_QUARTIC = TargetDensity(bimodal_quartic_log, name="bimodal-quartic")


def gaussian_log_pdf(x: float, mu: float, sigma2: float) -> float:
    return -0.5 * ((x - mu) ** 2 / sigma2 + math.log(sigma2) + _LOG_2PI)


@dataclass(frozen=True)
class GaussianSequentialProposal(ProposalSequence):
    """Gaussian conditionals centered on a weighted mean of the previous
    chain state and the earlier within-step points.

    With m = len(earlier):
        m == 0: mu = x
        m >= 1: mu = gamma1/m * (x + sum(earlier[:-1])) + gamma2 * earlier[-1]

    gamma1 + gamma2 must equal 1.  The mean depends only on the
    conditioning values, so the family is defined for every index.
    """

    sigma2: float = 1.0
    gamma1: float = 0.2
    gamma2: float = 0.8
    length: int | None = None

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ConfigurationError("sigma2 must be > 0")
        if abs(self.gamma1 + self.gamma2 - 1.0) > 1e-12:
            raise ConfigurationError("gamma1 + gamma2 must equal 1")

    def mean(self, x: float, earlier: Sequence[float]) -> float:
        m = len(earlier)
        if m == 0:
            return float(x)
        head = float(x)
        for v in earlier[:-1]:
            head += float(v)
        return self.gamma1 / m * head + self.gamma2 * float(earlier[-1])

    def sample(self, j, x, earlier, rng):
        return self.mean(x, earlier) + math.sqrt(self.sigma2) * rng.standard_normal()

    def eval_log(self, j, y, x, earlier):
        return gaussian_log_pdf(float(y), self.mean(x, earlier), self.sigma2)


def gaussian_random_walk(sigma2: float = 1.0) -> SharedProposal:
    """pi(y|x) = N(x, sigma2), identical at every index (i.i.d. candidates)."""
    if not sigma2 > 0:
        raise ConfigurationError("sigma2 must be > 0")
    sd = math.sqrt(sigma2)
    return SharedProposal(
        sample_fn=lambda x, rng: float(x) + sd * rng.standard_normal(),
        eval_log_fn=lambda y, x: gaussian_log_pdf(float(y), float(x), sigma2),
    )


_TARGETS = {"bimodal-quartic": BIMODAL_QUARTIC}


def make_target(target_id: str) -> TargetDensity:
    try:
        return _TARGETS[target_id]
    except KeyError:
        raise ConfigurationError(f"unknown target {target_id!r}") from None
