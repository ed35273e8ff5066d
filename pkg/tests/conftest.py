"""Shared fixtures: discrete models, proposal fixtures, and RNG adapters."""

ACCEPTANCE_LINES = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    """Collect one pass/fail line per acceptance criterion for the summary."""
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from multipoint import (
    DiscreteModel,
    GaussianSequentialProposal,
    TargetDensity,
    gaussian_random_walk,
    random_discrete_proposal,
    uniform_discrete_proposal,
)


class LegacyRng:
    """Adapter exposing the legacy Mersenne-Twister stream through the
    Generator-style method names the kernels consume.

    The compiled kernels draw from numpy's legacy global stream; wrapping a
    ``RandomState`` with the same seed lets the pure-Python kernels consume
    bit-identical draws, so the two implementations can be compared exactly.
    """

    def __init__(self, seed):
        self._rs = np.random.RandomState(seed)

    def standard_normal(self):
        return self._rs.standard_normal()

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._rs.normal(loc, scale, size)

    def random(self):
        return self._rs.random_sample()

    def integers(self, high):
        return self._rs.randint(high)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


@pytest.fixture
def seq_proposal():
    return GaussianSequentialProposal(sigma2=1.0, gamma1=0.2, gamma2=0.8)


@pytest.fixture
def rw_proposal():
    return gaussian_random_walk(1.0)


def make_model(M, N, seed=0, shared=False, uniform=False, log_p=None):
    """Discrete model with strictly positive conditionals, depth N + 1."""
    rng = np.random.default_rng(seed)
    if log_p is None:
        log_p = rng.normal(0.0, 1.0, size=M)
    if uniform:
        props = uniform_discrete_proposal(M, depth=N + 1, shared=shared)
    else:
        props = random_discrete_proposal(M, N + 1, rng, shared=shared)
    return DiscreteModel(M=M, log_p=np.asarray(log_p, float), props=props)


def quadratic_target():
    return TargetDensity(lambda x: -0.5 * float(x) ** 2, name="std-normal")
