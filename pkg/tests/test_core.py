"""Log-domain utilities, density interfaces, and point-set orientation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multipoint import (
    DegenerateWeightsError,
    FunctionProposalSequence,
    GaussianSequentialProposal,
    NumericError,
    PointSet,
    TargetDensity,
    log_joint_proposal,
    normalize_log_weights,
    sample_categorical,
)
from multipoint.models import gaussian_log_pdf

from conftest import make_model


class TestTargetDensity:
    def test_deterministic(self):
        t = TargetDensity(lambda x: -x * x)
        assert t.eval_log(1.5) == t.eval_log(1.5) == -2.25

    def test_neg_inf_is_legal(self):
        t = TargetDensity(lambda x: float("-inf") if x < 0 else 0.0)
        assert t.eval_log(-1.0) == float("-inf")

    def test_nan_raises(self):
        t = TargetDensity(lambda x: float("nan"))
        with pytest.raises(NumericError):
            t.eval_log(0.0)

    def test_pos_inf_raises(self):
        t = TargetDensity(lambda x: float("inf"))
        with pytest.raises(NumericError):
            t.eval_log(0.0)

    def test_scaled_shifts_log(self):
        t = TargetDensity(lambda x: -x * x)
        assert t.scaled(3.0).eval_log(2.0) == pytest.approx(-4.0 + 3.0, abs=0)


class TestPointSet:
    def test_reverse_is_involution(self):
        ps = PointSet((1.0, 2.0, 3.0))
        assert ps.reverse().reverse() == ps

    def test_forward_items(self):
        ps = PointSet((1.0, 2.0, 3.0), orientation="reversed")
        assert ps.forward_items() == (3.0, 2.0, 1.0)

    def test_bad_orientation_rejected(self):
        with pytest.raises(ValueError):
            PointSet((1.0,), orientation="sideways")

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=6))
    def test_reverse_involution_property(self, items):
        ps = PointSet(tuple(items))
        assert ps.reverse().reverse().items == ps.items


class TestLogJointProposal:
    def test_single_term(self):
        props = FunctionProposalSequence(
            sample_fn=None, eval_log_fn=lambda j, y, x, e: -0.5 * (y - x) ** 2)
        got = log_joint_proposal(props, 0.0, (1.0,), 1)
        assert got == pytest.approx(-0.5, abs=0)

    def test_uniform_discrete_product(self):
        model = make_model(3, 3, uniform=True)
        got = log_joint_proposal(model.props, 0, (1, 2, 0, 1), 4)
        assert got == pytest.approx(4 * math.log(1 / 3), abs=1e-12)

    def test_gaussian_sequence_hand_value(self):
        # sigma2=1, gamma1=0.2, gamma2=0.8; x=0, y=(1.0, -0.5), k=2:
        # mu_1 = 0, mu_2 = 0.2*0 + 0.8*1.0 = 0.8
        props = GaussianSequentialProposal()
        expected = (gaussian_log_pdf(1.0, 0.0, 1.0)
                    + gaussian_log_pdf(-0.5, 0.8, 1.0))
        got = log_joint_proposal(props, 0.0, (1.0, -0.5), 2)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_prefix_difference_is_single_conditional(self):
        props = GaussianSequentialProposal()
        ys = (0.3, -1.1, 0.7)
        for k in (2, 3):
            diff = (log_joint_proposal(props, 0.5, ys, k)
                    - log_joint_proposal(props, 0.5, ys, k - 1))
            single = props.eval_log(k, ys[k - 1], 0.5, ys[: k - 1])
            assert diff == pytest.approx(single, abs=1e-12)

    def test_k_out_of_range(self):
        props = GaussianSequentialProposal()
        with pytest.raises(ValueError):
            log_joint_proposal(props, 0.0, (1.0,), 0)
        with pytest.raises(ValueError):
            log_joint_proposal(props, 0.0, (1.0,), 2)

    def test_accepts_point_set_in_either_orientation(self):
        props = GaussianSequentialProposal()
        fwd = PointSet((1.0, -0.5))
        rev = fwd.reverse()
        assert (log_joint_proposal(props, 0.0, fwd, 2)
                == log_joint_proposal(props, 0.0, rev, 2))


class TestNormalizeLogWeights:
    def test_ratio_example(self):
        got = normalize_log_weights([math.log(1), math.log(1), math.log(2)])
        assert np.allclose(got, [0.25, 0.25, 0.5], atol=1e-12)

    def test_constant_entries_uniform(self):
        got = normalize_log_weights([-7.3, -7.3, -7.3])
        assert np.allclose(got, [1 / 3] * 3, atol=1e-12)

    def test_extreme_spread_no_underflow(self):
        got = normalize_log_weights([-1000.0, 0.0])
        assert got[1] == pytest.approx(1.0, abs=1e-12)
        assert got[0] == pytest.approx(math.exp(-1000) / (1 + math.exp(-1000)))
        assert np.isfinite(got).all()

    def test_all_neg_inf_degenerate(self):
        with pytest.raises(DegenerateWeightsError):
            normalize_log_weights([float("-inf")] * 3)

    def test_nan_rejected(self):
        with pytest.raises(NumericError):
            normalize_log_weights([0.0, float("nan")])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            normalize_log_weights([])

    @given(st.lists(st.floats(min_value=-50, max_value=50), min_size=1,
                    max_size=8),
           st.floats(min_value=-30, max_value=30))
    @settings(max_examples=200)
    def test_shift_invariance(self, logw, c):
        base = normalize_log_weights(logw)
        shifted = normalize_log_weights([v + c for v in logw])
        assert np.abs(base - shifted).max() <= 1e-12

    @given(st.lists(st.floats(min_value=-50, max_value=50), min_size=1,
                    max_size=8))
    def test_sums_to_one(self, logw):
        assert normalize_log_weights(logw).sum() == pytest.approx(1.0,
                                                                  abs=1e-12)


class TestSampleCategorical:
    def test_singleton(self):
        assert sample_categorical([1.0], 0.0) == 0
        assert sample_categorical([1.0], 0.999) == 0

    def test_middle_bin(self):
        assert sample_categorical([0.25, 0.25, 0.5], 0.3) == 1

    def test_last_bin(self):
        assert sample_categorical([0.25, 0.25, 0.5], 0.999) == 2

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            sample_categorical([], 0.5)

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            sample_categorical([0.4, 0.4], 0.5)

    def test_frequencies_match_probabilities(self):
        # 10^6 draws against 3-sigma binomial bounds
        probs = np.array([0.2, 0.5, 0.3])
        rng = np.random.default_rng(7)
        us = rng.random(1_000_000)
        idx = np.fromiter((sample_categorical(probs, u) for u in us),
                          dtype=np.int64, count=us.size)
        counts = np.bincount(idx, minlength=3)
        n = us.size
        for i, p in enumerate(probs):
            sigma = math.sqrt(n * p * (1 - p))
            assert abs(counts[i] - n * p) <= 3 * sigma
