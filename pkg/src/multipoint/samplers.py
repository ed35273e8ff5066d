"""Step kernels and the chain runner.

Five kernels: the generalized multi-point step (generic weights, correlated
candidates), the classical multi-point step (lambda-form weights, sum-ratio
acceptance), the i.i.d.-candidate generic-weight step, classical
multiple-try Metropolis, and plain Metropolis-Hastings.

Random-number consumption order is fixed per kernel so that kernels can be
driven with shared randomness in equivalence tests:

    candidates in index order -> one uniform for selection
    -> tail references in index order -> one uniform for acceptance

(mh_step consumes one candidate draw and one uniform).  The acceptance
probability itself is a pure function of (x, candidates, k, references);
the exact-enumeration verifier calls the same ``*_log_alpha`` functions.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (
    NEG_INF,
    ConfigurationError,
    DegenerateWeightsError,
    ProposalSequence,
    State,
    TargetDensity,
    log_joint_proposal,
    log_sum_exp,
    normalize_log_weights,
    sample_categorical,
)
from .weights import WeightFamily


@dataclass(frozen=True)
class MultiPointConfig:
    """Configuration shared by the multi-try kernels."""

    n_tries: int
    target: TargetDensity
    props: ProposalSequence
    weights: WeightFamily
    degenerate_policy: str = "reject-move"

    def __post_init__(self):
        if self.n_tries < 1:
            raise ConfigurationError("n_tries must be >= 1")
        if self.props.length is not None and self.n_tries > self.props.length:
            raise ConfigurationError("n_tries exceeds the proposal sequence length")
        if self.degenerate_policy != "reject-move":
            raise ConfigurationError(
                f"unknown degenerate policy {self.degenerate_policy!r}")


@dataclass(frozen=True)
class StepOutcome:
    next_state: State
    accepted: bool
    alpha: float
    k: int  # 1-based index of the selected candidate
    candidates: tuple
    references: tuple
    log_wbar_y: float
    log_wbar_x: float


@dataclass
class ChainTrace:
    """Time-ordered record of (thinned, post burn-in) states and step data."""

    states: np.ndarray
    accept_flags: np.ndarray
    alphas: np.ndarray
    rng_seed: int
    sampler_id: str
    config_digest: str = ""

    def __post_init__(self):
        if not (len(self.states) == len(self.accept_flags) == len(self.alphas)):
            raise ValueError("trace field lengths disagree")

    def __len__(self):
        return len(self.states)


# ---------------------------------------------------------------------------
# pure acceptance computations (shared with the enumeration verifier)
# ---------------------------------------------------------------------------

def forward_log_weights(weights: WeightFamily, target: TargetDensity,
                        props: ProposalSequence, x: State,
                        ys: Sequence[State]) -> list[float]:
    """log w_j(y_{j:1}, x) for j = 1..N."""
    return [weights.eval_log(j, tuple(reversed(ys[:j])) + (x,), target, props)
            for j in range(1, len(ys) + 1)]


def backward_log_weights(weights: WeightFamily, target: TargetDensity,
                         props: ProposalSequence, y: State,
                         refs: Sequence[State]) -> list[float]:
    """log w_j(x*_{j:1}, y) for j = 1..N."""
    return [weights.eval_log(j, tuple(reversed(refs[:j])) + (y,), target, props)
            for j in range(1, len(refs) + 1)]


def generic_log_alpha(target: TargetDensity, props: ProposalSequence,
                      x: State, ys: Sequence[State], k: int,
                      refs: Sequence[State], logw_f: Sequence[float],
                      logw_b: Sequence[float]) -> float:
    """Log acceptance ratio of the generalized multi-point step (pre-clamp)."""
    lse_f = log_sum_exp(logw_f)
    lse_b = log_sum_exp(logw_b)
    if logw_b[k - 1] == NEG_INF or lse_b == NEG_INF:
        return NEG_INF
    y = ys[k - 1]
    log_wy = logw_f[k - 1] - lse_f
    log_wx = logw_b[k - 1] - lse_b
    num = target.eval_log(y) + log_joint_proposal(props, y, refs[:k], k)
    den = target.eval_log(x) + log_joint_proposal(props, x, ys[:k], k)
    return num - den + log_wx - log_wy


def qin_log_alpha(logw_f: Sequence[float], logw_b: Sequence[float]) -> float:
    """Log sum-of-weights ratio of the classical multi-point acceptance."""
    lse_f = log_sum_exp(logw_f)
    lse_b = log_sum_exp(logw_b)
    if lse_f == NEG_INF:
        return NEG_INF
    if lse_b == NEG_INF:
        return math.inf  # zero denominator: certain acceptance
    return lse_f - lse_b


def iid_log_alpha(target: TargetDensity, props: ProposalSequence,
                  x: State, y: State, k: int, logw_f: Sequence[float],
                  logw_b: Sequence[float]) -> float:
    """Log acceptance ratio of the i.i.d.-candidate generic-weight step."""
    lse_f = log_sum_exp(logw_f)
    lse_b = log_sum_exp(logw_b)
    if logw_b[k - 1] == NEG_INF or lse_b == NEG_INF:
        return NEG_INF
    log_wy = logw_f[k - 1] - lse_f
    log_wx = logw_b[k - 1] - lse_b
    num = target.eval_log(y) + props.eval_log(1, x, y, ())
    den = target.eval_log(x) + props.eval_log(1, y, x, ())
    return num - den + log_wx - log_wy


def mh_log_alpha(target: TargetDensity, props: ProposalSequence,
                 x: State, y: State) -> float:
    num = target.eval_log(y) + props.eval_log(1, x, y, ())
    den = target.eval_log(x) + props.eval_log(1, y, x, ())
    return num - den


def clamp_alpha(log_ratio: float) -> float:
    """alpha = min(1, exp(log_ratio)), saturating before exponentiation."""
    if log_ratio >= 0.0:
        return 1.0
    return math.exp(log_ratio)


# ---------------------------------------------------------------------------
# step kernels
# ---------------------------------------------------------------------------

def _draw_candidates(props: ProposalSequence, x: State, n: int, rng) -> list:
    ys = []
    for j in range(1, n + 1):
        ys.append(props.sample(j, x, ys[: j - 1], rng))
    return ys


def build_reference_set(ys: Sequence[State], k: int, x: State,
                        props: ProposalSequence, rng) -> list:
    """Reference points: reversed leading candidates, the old state, sampled tail.

    x*_1 = y_{k-1}, ..., x*_{k-1} = y_1, x*_k = x; for j > k the tail is
    drawn from pi_j conditioned on the selected candidate y_k.
    """
    n = len(ys)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    y = ys[k - 1]
    refs = [ys[k - 1 - i] for i in range(1, k)] + [x]
    for j in range(k + 1, n + 1):
        refs.append(props.sample(j, y, refs[: j - 1], rng))
    return refs


def _rejected(x: State, ys, refs=()) -> StepOutcome:
    return StepOutcome(x, False, 0.0, 0, tuple(ys), tuple(refs), NEG_INF, NEG_INF)


def mp_generic_step(cfg: MultiPointConfig, x: State, rng) -> StepOutcome:
    """One step of the generalized multi-point kernel (correlated candidates,
    arbitrary bounded positive weights)."""
    n = cfg.n_tries
    ys = _draw_candidates(cfg.props, x, n, rng)
    logw_f = forward_log_weights(cfg.weights, cfg.target, cfg.props, x, ys)
    u_sel = rng.random()
    try:
        probs = normalize_log_weights(logw_f)
    except DegenerateWeightsError:
        return _rejected(x, ys)
    k = sample_categorical(probs, u_sel) + 1
    y = ys[k - 1]
    refs = build_reference_set(ys, k, x, cfg.props, rng)
    logw_b = backward_log_weights(cfg.weights, cfg.target, cfg.props, y, refs)
    log_ratio = generic_log_alpha(cfg.target, cfg.props, x, ys, k, refs,
                                  logw_f, logw_b)
    alpha = clamp_alpha(log_ratio)
    accepted = rng.random() < alpha
    lse_f, lse_b = log_sum_exp(logw_f), log_sum_exp(logw_b)
    return StepOutcome(y if accepted else x, accepted, alpha, k,
                       tuple(ys), tuple(refs),
                       logw_f[k - 1] - lse_f,
                       logw_b[k - 1] - lse_b if lse_b != NEG_INF else NEG_INF)


def qin_mp_step(cfg: MultiPointConfig, x: State, rng) -> StepOutcome:
    """Classical multi-point step: lambda-form weights, sum-ratio acceptance."""
    if not cfg.weights.is_lambda_form:
        raise ConfigurationError("qin_mp_step requires a LAMBDA weight family")
    n = cfg.n_tries
    ys = _draw_candidates(cfg.props, x, n, rng)
    logw_f = forward_log_weights(cfg.weights, cfg.target, cfg.props, x, ys)
    u_sel = rng.random()
    try:
        probs = normalize_log_weights(logw_f)
    except DegenerateWeightsError:
        return _rejected(x, ys)
    k = sample_categorical(probs, u_sel) + 1
    y = ys[k - 1]
    refs = build_reference_set(ys, k, x, cfg.props, rng)
    logw_b = backward_log_weights(cfg.weights, cfg.target, cfg.props, y, refs)
    log_ratio = qin_log_alpha(logw_f, logw_b)
    alpha = 1.0 if log_ratio == math.inf else clamp_alpha(log_ratio)
    accepted = rng.random() < alpha
    lse_f, lse_b = log_sum_exp(logw_f), log_sum_exp(logw_b)
    return StepOutcome(y if accepted else x, accepted, alpha, k,
                       tuple(ys), tuple(refs),
                       logw_f[k - 1] - lse_f,
                       logw_b[k - 1] - lse_b if lse_b != NEG_INF else NEG_INF)


def _shared_step(cfg: MultiPointConfig, x: State, rng,
                 alpha_fn: Callable) -> StepOutcome:
    """Common mechanics of the i.i.d.-candidate kernels.

    All candidates are i.i.d. from pi(.|x); the reference set keeps the old
    state at the selected slot and redraws every other slot i.i.d. from
    pi(.|y), in index order.  Selection weights are the arity-1 weights
    w(y_j, x).
    """
    n = cfg.n_tries
    ys = [cfg.props.sample(j, x, (), rng) for j in range(1, n + 1)]
    logw_f = [cfg.weights.eval_log(1, (yj, x), cfg.target, cfg.props) for yj in ys]
    u_sel = rng.random()
    try:
        probs = normalize_log_weights(logw_f)
    except DegenerateWeightsError:
        return _rejected(x, ys)
    k = sample_categorical(probs, u_sel) + 1
    y = ys[k - 1]
    refs = [x if j == k else cfg.props.sample(j, y, (), rng)
            for j in range(1, n + 1)]
    logw_b = [cfg.weights.eval_log(1, (rj, y), cfg.target, cfg.props) for rj in refs]
    log_ratio = alpha_fn(cfg, x, y, k, logw_f, logw_b)
    alpha = 1.0 if log_ratio == math.inf else clamp_alpha(log_ratio)
    accepted = rng.random() < alpha
    lse_f, lse_b = log_sum_exp(logw_f), log_sum_exp(logw_b)
    return StepOutcome(y if accepted else x, accepted, alpha, k,
                       tuple(ys), tuple(refs),
                       logw_f[k - 1] - lse_f,
                       logw_b[k - 1] - lse_b if lse_b != NEG_INF else NEG_INF)


def iid_generic_step(cfg: MultiPointConfig, x: State, rng) -> StepOutcome:
    """Independent-candidate step with generic (arity-1) weights."""
    return _shared_step(
        cfg, x, rng,
        lambda c, x_, y_, k_, lf, lb: iid_log_alpha(
            c.target, c.props, x_, y_, k_, lf, lb))


def liu_mtm_step(cfg: MultiPointConfig, x: State, rng) -> StepOutcome:
    """Classical multiple-try Metropolis (sum-ratio acceptance, i.i.d. tries)."""
    if not cfg.weights.is_lambda_form:
        raise ConfigurationError("liu_mtm_step requires a LAMBDA weight family")
    return _shared_step(cfg, x, rng,
                        lambda c, x_, y_, k_, lf, lb: qin_log_alpha(lf, lb))


def mh_step(target: TargetDensity, props: ProposalSequence, x: State,
            rng) -> StepOutcome:
    """Classical Metropolis-Hastings step."""
    y = props.sample(1, x, (), rng)
    alpha = clamp_alpha(mh_log_alpha(target, props, x, y))
    accepted = rng.random() < alpha
    return StepOutcome(y if accepted else x, accepted, alpha, 1,
                       (y,), (x,), 0.0, 0.0)


# ---------------------------------------------------------------------------
# chain runner
# ---------------------------------------------------------------------------

def config_digest(parts) -> str:
    return hashlib.sha256(repr(parts).encode()).hexdigest()[:16]


def run_chain(step_kernel: Callable[[State, object], StepOutcome], x0: State,
              n_steps: int, burn_in: int = 0, thin: int = 1,
              seed: int = 0, sampler_id: str = "custom",
              digest: str = "") -> ChainTrace:
    """Iterate a step kernel; record post burn-in states at the given thinning.

    Fully reproducible from the seed.  Kernel errors propagate with the step
    index attached.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not 0 <= burn_in < n_steps:
        raise ValueError("burn_in must satisfy 0 <= burn_in < n_steps")
    if thin < 1:
        raise ValueError("thin must be >= 1")
    rng = np.random.default_rng(seed)
    x = x0
    states, flags, alphas = [], [], []
    for t in range(n_steps):
        try:
            out = step_kernel(x, rng)
        except Exception as exc:
            raise type(exc)(f"step {t}: {exc}") from exc
        x = out.next_state
        if t >= burn_in and (t - burn_in) % thin == 0:
            states.append(x)
            flags.append(out.accepted)
            alphas.append(out.alpha)
    return ChainTrace(np.asarray(states), np.asarray(flags, dtype=bool),
                      np.asarray(alphas, dtype=float), seed, sampler_id, digest)
