"""Weight-function families for the multi-point selection step.

Every family evaluates log w_j(z_1, ..., z_{j+1}) where z_1 is the most
recently generated point, z_j the first drawn point, and z_{j+1} the
previous state of the chain.  Evaluations return a finite float or -inf;
boundedness of the chosen family on the target's support is the caller's
obligation (checked statistically for CUSTOM).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (
    NEG_INF,
    ConfigurationError,
    ProposalSequence,
    TargetDensity,
    UnboundedWeightError,
    _checked_log,
    log_joint_proposal,
)


@dataclass(frozen=True)
class LambdaFunction:
    """Auxiliary factor of the classical multi-point weight form.

    ``eval_log(z1, rest)`` returns log lambda_j(z1, rest) for a tuple
    ``rest = (z_2, ..., z_{j+1})``.  Sequential symmetry means
    lambda_j(z_1, z_{2:j+1}) == lambda_j(z_{j+1:2}, z_1); set
    ``declared_symmetric`` only when that holds analytically.
    """

    eval_log: Callable[[object, tuple], float]
    declared_symmetric: bool = False
    name: str = "lambda"

    @staticmethod
    def from_linear(fn: Callable[[object, tuple], float], declared_symmetric=False,
                    name="lambda") -> "LambdaFunction":
        def _log(z1, rest):
            v = fn(z1, rest)
            if not v > 0:
                raise UnboundedWeightError(f"lambda {name!r} is {v} (must be > 0)")
            return math.log(v)

        return LambdaFunction(_log, declared_symmetric, name)

    def eval_log_reversed(self, z1, rest) -> float:
        """Evaluate on the sequentially reversed argument tuple."""
        rest = tuple(rest)
        return self.eval_log(rest[-1], tuple(reversed(rest[:-1])) + (z1,))


UNIT_LAMBDA = LambdaFunction(lambda z1, rest: 0.0, declared_symmetric=True, name="unit")


@dataclass(frozen=True)
class WeightFamily:
    """Uniform interface over the shipped weight families.

    ``eval_log(j, z, target, props)`` takes the arity j and the argument
    tuple z of length j + 1.  ``log_shift_degree(j)`` is the factor by which
    the log weight at arity j shifts when the target density is multiplied
    by a constant c (shift = degree * log c); sampler scale-invariance tests
    assert the exact shift.
    """

    family_id: str
    eval_log_fn: Callable[[int, tuple, TargetDensity, ProposalSequence], float]
    log_shift_degree: Callable[[int], float]
    params: dict = field(default_factory=dict)
    lam: LambdaFunction | None = None

    def eval_log(self, j: int, z: Sequence, target: TargetDensity,
                 props: ProposalSequence | None = None) -> float:
        z = tuple(z)
        if len(z) != j + 1:
            raise ValueError(f"arity {j} needs {j + 1} arguments, got {len(z)}")
        return _checked_log(self.eval_log_fn(j, z, target, props),
                            f"weight family {self.family_id}")

    @property
    def is_lambda_form(self) -> bool:
        return self.lam is not None


def weight_w1(theta: float = 0.5) -> WeightFamily:
    """w_j = p(z_1)^theta: the cheapest family, target-only."""
    if not theta > 0:
        raise ConfigurationError("theta must be > 0")

    def _eval(j, z, target, props):
        return theta * target.eval_log(z[0])

    return WeightFamily("W1", _eval, lambda j: theta, params={"theta": theta})


def weight_w2() -> WeightFamily:
    """w_j = p(z_1) p(z_2) ... p(z_{j+1}): product over the whole tuple."""

    def _eval(j, z, target, props):
        return sum(target.eval_log(zi) for zi in z)

    return WeightFamily("W2", _eval, lambda j: float(j + 1))


def weight_w3() -> WeightFamily:
    """w_j = p(z_1) / pi_{j+1}(z_1 | z_{j+1:2}).

    The proposal is evaluated at index j + 1 with previous state z_{j+1}
    and earlier points (z_j, ..., z_2); the shipped proposal families
    extend to that index by their conditional-mean rule.
    """

    def _eval(j, z, target, props):
        lp = target.eval_log(z[0])
        lq = props.eval_log(j + 1, z[0], z[j], tuple(reversed(z[1:j])))
        if lq == NEG_INF:
            raise UnboundedWeightError(
                "proposal density is zero at the evaluation point; "
                "W3 is unbounded for this model")
        return lp - lq

    return WeightFamily("W3", _eval, lambda j: 1.0)


def weight_ratio_theta(theta: float = 1.0) -> WeightFamily:
    """w_j = [p(z_1) / q_j(z_{1:j} | z_{j+1})]^theta.

    q_j conditions on z_{j+1} with candidates in temporal order
    z_j, z_{j-1}, ..., z_1.
    """
    if not theta > 0:
        raise ConfigurationError("theta must be > 0")

    def _eval(j, z, target, props):
        lq = log_joint_proposal(props, z[j], tuple(reversed(z[:j])), j)
        if lq == NEG_INF:
            raise UnboundedWeightError("joint proposal density is zero")
        return theta * (target.eval_log(z[0]) - lq)

    return WeightFamily("RATIO_THETA", _eval, lambda j: theta,
                        params={"theta": theta})


def weight_ratio_product() -> WeightFamily:
    """w_j = prod_{i=j..1} p(z_i) / q_{j-i+1}(z_{i:j} | z_{j+1})."""

    def _eval(j, z, target, props):
        total = 0.0
        for i in range(j, 0, -1):
            lq = log_joint_proposal(props, z[j], tuple(reversed(z[i - 1:j])),
                                    j - i + 1)
            if lq == NEG_INF:
                raise UnboundedWeightError("joint proposal density is zero")
            total += target.eval_log(z[i - 1]) - lq
        return total

    return WeightFamily("RATIO_PRODUCT", _eval, lambda j: float(j))


def weight_lambda(lam: LambdaFunction = UNIT_LAMBDA) -> WeightFamily:
    """Classical multi-point form: w_j = p(z_1) q_j(z_{2:j+1} | z_1) lambda_j."""

    def _eval(j, z, target, props):
        lp = target.eval_log(z[0])
        lq = log_joint_proposal(props, z[0], z[1:], j)
        return lp + lq + lam.eval_log(z[0], z[1:])

    return WeightFamily("LAMBDA", _eval, lambda j: 1.0,
                        params={"lambda": lam.name}, lam=lam)


def weight_custom(eval_log_fn, log_shift_degree, name: str = "CUSTOM") -> WeightFamily:
    """User-supplied family; boundedness is validated only statistically."""
    return WeightFamily(name, eval_log_fn, log_shift_degree)


def check_sequential_symmetry(lam: LambdaFunction, trials: int, rng,
                              arities: Sequence[int] = (1, 2, 3),
                              scale: float = 2.0) -> float:
    """Max relative discrepancy of log lambda under sequential reversal."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    worst = 0.0
    for _ in range(trials):
        for j in arities:
            pts = [float(v) for v in rng.normal(0.0, scale, size=j + 1)]
            a = lam.eval_log(pts[0], tuple(pts[1:]))
            b = lam.eval_log_reversed(pts[0], tuple(pts[1:]))
            denom = max(abs(a), abs(b), 1.0)
            worst = max(worst, abs(a - b) / denom)
    return worst


def sampled_boundedness_check(family: WeightFamily, target: TargetDensity,
                              props: ProposalSequence, rng, trials: int = 200,
                              arities: Sequence[int] = (1, 2, 3),
                              scale: float = 2.0) -> float:
    """Sampled sup of the log weight; raises on NaN/+inf via eval_log."""
    sup = NEG_INF
    for _ in range(trials):
        for j in arities:
            z = tuple(float(v) for v in rng.normal(0.0, scale, size=j + 1))
            sup = max(sup, family.eval_log(j, z, target, props))
    return sup


_BUILDERS = {
    "W1": lambda params: weight_w1(float(params.get("theta", 0.5))),
    "W2": lambda params: weight_w2(),
    "W3": lambda params: weight_w3(),
    "RATIO_THETA": lambda params: weight_ratio_theta(float(params.get("theta", 1.0))),
    "RATIO_PRODUCT": lambda params: weight_ratio_product(),
    "LAMBDA": lambda params: weight_lambda(params.get("lambda", UNIT_LAMBDA)),
}


def make_weight_family(family_id: str, params: dict | None = None) -> WeightFamily:
    """Build a weight family from its string id and a parameter map."""
    params = dict(params or {})
    try:
        builder = _BUILDERS[family_id]
    except KeyError:
        raise ConfigurationError(f"unknown weight family {family_id!r}") from None
    return builder(params)
