"""Exact transition-kernel enumeration on finite state spaces.

On a finite state space every auxiliary variable of a multi-try step
(candidate tuple, selection index, tail references) can be summed out
exactly, which turns the detailed-balance proof into an executable check.
The acceptance probabilities inside the enumeration are computed by the
same ``*_log_alpha`` functions the samplers use, so the oracle tests the
shipped arithmetic, not a re-derivation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .core import (
    NEG_INF,
    DegenerateWeightsError,
    MultipointError,
    ProposalSequence,
    TargetDensity,
    normalize_log_weights,
)
from .samplers import (
    MultiPointConfig,
    backward_log_weights,
    clamp_alpha,
    forward_log_weights,
    generic_log_alpha,
    iid_log_alpha,
    mh_log_alpha,
    mp_generic_step,
    qin_log_alpha,
)
from .weights import UNIT_LAMBDA, LambdaFunction, WeightFamily, weight_lambda

ENUMERATION_GUARD = 10 ** 8

VARIANTS = ("generic", "qin", "iid", "mtm", "mh")


class VerificationError(MultipointError):
    pass


@dataclass(frozen=True)
class DiscreteProposal(ProposalSequence):
    """Conditional probability tables over {0, ..., M-1}.

    ``table`` maps a conditioning tuple (previous state, then the earlier
    within-step points) to a length-M probability vector.  With
    ``shared=True`` only the previous state is used (i.i.d. candidates).
    """

    M: int = 2
    table: dict = field(default_factory=dict)
    shared: bool = False
    length: int | None = None

    def __post_init__(self):
        for key, probs in self.table.items():
            p = np.asarray(probs, dtype=float)
            if p.shape != (self.M,) or (p < 0).any():
                raise VerificationError(f"bad conditional slice at {key}")
            if abs(p.sum() - 1.0) > 1e-12:
                raise VerificationError(f"slice at {key} sums to {p.sum()}")

    def _probs(self, x, earlier) -> np.ndarray:
        key = (int(x),) if self.shared else (int(x),) + tuple(int(e) for e in earlier)
        try:
            return np.asarray(self.table[key], dtype=float)
        except KeyError:
            raise VerificationError(f"no conditional slice for {key}") from None

    def sample(self, j, x, earlier, rng):
        p = self._probs(x, earlier)
        return int(np.searchsorted(np.cumsum(p), rng.random(), side="right"))

    def eval_log(self, j, y, x, earlier):
        v = self._probs(x, earlier)[int(y)]
        return math.log(v) if v > 0 else NEG_INF


def uniform_discrete_proposal(M: int, depth: int, shared: bool = False) -> DiscreteProposal:
    table = {}
    p = np.full(M, 1.0 / M)
    lengths = [1] if shared else range(1, depth + 1)
    for m in lengths:
        for key in product(range(M), repeat=m):
            table[key] = p.copy()
    return DiscreteProposal(M=M, table=table, shared=shared)


def random_discrete_proposal(M: int, depth: int, rng,
                             shared: bool = False) -> DiscreteProposal:
    """Strictly positive random conditionals for every conditioning tuple."""
    table = {}
    lengths = [1] if shared else range(1, depth + 1)
    for m in lengths:
        for key in product(range(M), repeat=m):
            raw = rng.random(M) + 0.1
            table[key] = raw / raw.sum()
    return DiscreteProposal(M=M, table=table, shared=shared)


@dataclass(frozen=True)
class DiscreteModel:
    """Finite-state target plus proposal tables for exact verification."""

    M: int
    log_p: np.ndarray
    props: DiscreteProposal

    def __post_init__(self):
        lp = np.asarray(self.log_p, dtype=float)
        object.__setattr__(self, "log_p", lp)
        if lp.shape != (self.M,):
            raise VerificationError("log_p length must equal M")
        if np.isnan(lp).any() or np.isposinf(lp).any():
            raise VerificationError("log_p entries must be finite or -inf")
        if not np.isfinite(lp).any():
            raise VerificationError("target has no support")
        if self.props.M != self.M:
            raise VerificationError("proposal state count differs from M")

    @property
    def target(self) -> TargetDensity:
        lp = self.log_p
        return TargetDensity(lambda x: float(lp[int(x)]), name="discrete")

    def normalized_target(self) -> np.ndarray:
        w = np.exp(self.log_p - self.log_p[np.isfinite(self.log_p)].max())
        return w / w.sum()


def _enumeration_terms(M: int, N: int, variant: str) -> int:
    if variant == "mh":
        return M
    if variant in ("iid", "mtm"):
        return M ** N * N * M ** (N - 1)
    return M ** N * sum(M ** (N - k) for k in range(1, N + 1))


def enumerate_kernel(model: DiscreteModel, weights: WeightFamily, n_tries: int,
                     variant: str = "generic") -> np.ndarray:
    """Exact one-step transition matrix A[x, y] of the chosen kernel variant.

    Accumulation is in linear probability with compensated summation
    (math.fsum); terms are products of at most 2N + 2 probabilities, so the
    log domain is unnecessary on tiny state spaces.
    """
    if variant not in VARIANTS:
        raise VerificationError(f"unknown variant {variant!r}")
    M, N = model.M, n_tries
    total = M * _enumeration_terms(M, N, variant)
    if total > ENUMERATION_GUARD:
        raise VerificationError(f"enumeration size {total} exceeds guard")
    target, props = model.target, model.props

    terms = [[[] for _ in range(M)] for _ in range(M)]
    states = range(M)

    if variant == "mh":
        for x in states:
            for y in states:
                if y == x:
                    continue
                p_y = math.exp(props.eval_log(1, y, x, ()))
                if p_y == 0.0:
                    continue
                alpha = clamp_alpha(mh_log_alpha(target, props, x, y))
                terms[x][y].append(p_y * alpha)
                terms[x][x].append(p_y * (1.0 - alpha))
            terms[x][x].append(math.exp(props.eval_log(1, x, x, ())))
        return _assemble(terms, M)

    correlated = variant in ("generic", "qin")
    for x in states:
        for ys in product(states, repeat=N):
            if correlated:
                prob_f = 1.0
                for j in range(1, N + 1):
                    prob_f *= math.exp(props.eval_log(j, ys[j - 1], x, ys[: j - 1]))
            else:
                prob_f = 1.0
                for yj in ys:
                    prob_f *= math.exp(props.eval_log(1, yj, x, ()))
            if prob_f == 0.0:
                continue
            if correlated:
                logw_f = forward_log_weights(weights, target, props, x, list(ys))
            else:
                logw_f = [weights.eval_log(1, (yj, x), target, props) for yj in ys]
            try:
                sel = normalize_log_weights(logw_f)
            except DegenerateWeightsError:
                terms[x][x].append(prob_f)  # reject-move policy
                continue
            for k in range(1, N + 1):
                wbar = float(sel[k - 1])
                if wbar == 0.0:
                    continue
                y = ys[k - 1]
                base = prob_f * wbar
                if correlated:
                    head = [ys[k - 1 - i] for i in range(1, k)] + [x]
                    for tail in product(states, repeat=N - k):
                        refs = head + list(tail)
                        prob_t = 1.0
                        for i in range(k + 1, N + 1):
                            prob_t *= math.exp(
                                props.eval_log(i, refs[i - 1], y, refs[: i - 1]))
                        if prob_t == 0.0:
                            continue
                        logw_b = backward_log_weights(weights, target, props,
                                                      y, refs)
                        if variant == "generic":
                            lr = generic_log_alpha(target, props, x, list(ys),
                                                   k, refs, logw_f, logw_b)
                        else:
                            lr = qin_log_alpha(logw_f, logw_b)
                        alpha = 1.0 if lr == math.inf else clamp_alpha(lr)
                        mass = base * prob_t
                        terms[x][y].append(mass * alpha)
                        terms[x][x].append(mass * (1.0 - alpha))
                else:
                    for tail in product(states, repeat=N - 1):
                        refs = list(tail[: k - 1]) + [x] + list(tail[k - 1:])
                        prob_t = 1.0
                        for j in range(1, N + 1):
                            if j != k:
                                prob_t *= math.exp(
                                    props.eval_log(1, refs[j - 1], y, ()))
                        if prob_t == 0.0:
                            continue
                        logw_b = [weights.eval_log(1, (rj, y), target, props)
                                  for rj in refs]
                        if variant == "iid":
                            lr = iid_log_alpha(target, props, x, y, k,
                                               logw_f, logw_b)
                        else:
                            lr = qin_log_alpha(logw_f, logw_b)
                        alpha = 1.0 if lr == math.inf else clamp_alpha(lr)
                        mass = base * prob_t
                        terms[x][y].append(mass * alpha)
                        terms[x][x].append(mass * (1.0 - alpha))
    return _assemble(terms, M)


def _assemble(terms, M: int) -> np.ndarray:
    A = np.empty((M, M))
    for x in range(M):
        for y in range(M):
            A[x, y] = math.fsum(terms[x][y])
    return A


def check_kernel_matrix(A: np.ndarray, tol: float = 1e-12) -> None:
    if (A < -tol).any():
        raise VerificationError("negative kernel entry")
    rows = A.sum(axis=1)
    if np.abs(rows - 1.0).max() > tol:
        raise VerificationError(f"row sums deviate by {np.abs(rows - 1).max()}")


def balance_flows(A: np.ndarray, log_p: Sequence[float]):
    """Per-pair forward/backward probability flows and their residuals."""
    lp = np.asarray(log_p, dtype=float)
    w = np.exp(lp - lp[np.isfinite(lp)].max())
    p = w / w.sum()
    rows = []
    M = A.shape[0]
    for x in range(M):
        for y in range(M):
            fwd = p[x] * A[x, y]
            bwd = p[y] * A[y, x]
            rows.append((x, y, fwd, bwd, abs(fwd - bwd)))
    return rows


def check_detailed_balance(A: np.ndarray, log_p: Sequence[float]) -> float:
    """Max over state pairs of |p(x) A[x,y] - p(y) A[y,x]| (p normalized)."""
    return max(r[4] for r in balance_flows(A, log_p))


def stationary_distribution(A: np.ndarray, tol: float = 1e-14,
                            max_iter: int = 1_000_000) -> np.ndarray:
    """Fixed point of v = v A by power iteration."""
    M = A.shape[0]
    if not (np.linalg.matrix_power(A, M) > 0).all():
        raise VerificationError("kernel is not ergodic (A^M has zero entries)")
    v = np.full(M, 1.0 / M)
    for _ in range(max_iter):
        nxt = v @ A
        nxt /= nxt.sum()
        if np.abs(nxt - v).max() <= tol:
            return nxt
        v = nxt
    raise VerificationError("power iteration did not converge")


def check_reduction_to_qin(target_or_model, props: ProposalSequence = None,
                           lam: LambdaFunction = UNIT_LAMBDA, n_tries: int = 2,
                           trials: int = 100, seed: int = 0,
                           state_sampler=None) -> float:
    """Max |alpha_generic - alpha_qin| over trials with shared randomness.

    Both kernels use the same lambda-form weights and consume identical
    random draws, so with a sequentially symmetric lambda the discrepancy
    is pure floating-point noise.
    """
    from .samplers import qin_mp_step  # local alias for symmetry with generic

    if isinstance(target_or_model, DiscreteModel):
        target = target_or_model.target
        props = target_or_model.props
        M = target_or_model.M
        if state_sampler is None:
            finite = np.flatnonzero(np.isfinite(target_or_model.log_p))
            state_sampler = lambda rng: int(finite[rng.integers(len(finite))])
    else:
        target = target_or_model
        if state_sampler is None:
            state_sampler = lambda rng: float(rng.normal())

    cfg = MultiPointConfig(n_tries=n_tries, target=target, props=props,
                           weights=weight_lambda(lam))
    master = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = state_sampler(master)
        s = int(master.integers(2 ** 63))
        a_g = mp_generic_step(cfg, x, np.random.default_rng(s)).alpha
        a_q = qin_mp_step(cfg, x, np.random.default_rng(s)).alpha
        worst = max(worst, abs(a_g - a_q))
    return worst
