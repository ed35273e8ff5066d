"""Weight-family evaluations, homogeneity degrees, and symmetry checks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multipoint import (
    BIMODAL_QUARTIC,
    ConfigurationError,
    GaussianSequentialProposal,
    LambdaFunction,
    UNIT_LAMBDA,
    UnboundedWeightError,
    check_sequential_symmetry,
    gaussian_random_walk,
    log_joint_proposal,
    make_weight_family,
    weight_lambda,
    weight_ratio_product,
    weight_ratio_theta,
    weight_w1,
    weight_w2,
    weight_w3,
)
from multipoint.models import gaussian_log_pdf
from multipoint.weights import sampled_boundedness_check

from conftest import make_model, quadratic_target

FAMILIES_NEEDING_PROPS = ("W3", "RATIO_THETA", "RATIO_PRODUCT", "LAMBDA")


def all_families():
    return [
        weight_w1(1.0),
        weight_w1(0.5),
        weight_w2(),
        weight_w3(),
        weight_ratio_theta(1.0),
        weight_ratio_product(),
        weight_lambda(UNIT_LAMBDA),
    ]


class TestW1:
    def test_mode_value(self):
        fam = weight_w1(1.0)
        assert fam.eval_log(1, (2.0, 0.0), BIMODAL_QUARTIC) == 0.0

    def test_valley_value_half_theta(self):
        fam = weight_w1(0.5)
        assert fam.eval_log(1, (0.0, 2.0), BIMODAL_QUARTIC) == -2.0

    def test_linear_in_theta(self):
        a = weight_w1(0.7).eval_log(2, (1.3, 0.1, -0.2), BIMODAL_QUARTIC)
        b = weight_w1(1.4).eval_log(2, (1.3, 0.1, -0.2), BIMODAL_QUARTIC)
        assert b == pytest.approx(2 * a, abs=1e-12)

    def test_ignores_everything_but_z1(self):
        fam = weight_w1(1.0)
        assert (fam.eval_log(2, (1.0, 5.0, -9.0), BIMODAL_QUARTIC)
                == fam.eval_log(2, (1.0, 0.0, 0.0), BIMODAL_QUARTIC))

    def test_theta_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            weight_w1(0.0)


class TestW2:
    def test_smallest_arity(self):
        fam = weight_w2()
        got = fam.eval_log(1, (1.0, -0.5), BIMODAL_QUARTIC)
        expected = (BIMODAL_QUARTIC.eval_log(1.0)
                    + BIMODAL_QUARTIC.eval_log(-0.5))
        assert got == pytest.approx(expected, abs=0)

    def test_equal_points(self):
        fam = weight_w2()
        for j in (1, 2, 3):
            z = (0.7,) * (j + 1)
            assert fam.eval_log(j, z, BIMODAL_QUARTIC) == pytest.approx(
                (j + 1) * BIMODAL_QUARTIC.eval_log(0.7), abs=1e-12)

    @given(st.permutations([0.3, -1.2, 0.9, 2.1]))
    def test_permutation_invariant(self, perm):
        fam = weight_w2()
        base = fam.eval_log(3, (0.3, -1.2, 0.9, 2.1), BIMODAL_QUARTIC)
        assert fam.eval_log(3, tuple(perm), BIMODAL_QUARTIC) == pytest.approx(
            base, abs=1e-12)


class TestW3:
    def test_iid_mode_reduces_to_single_conditional(self):
        # all proposals identical: value is log p(z_1) - log pi(z_1 | z_{j+1})
        props = gaussian_random_walk(1.0)
        fam = weight_w3()
        for j in (1, 2, 3):
            z = (1.1, 0.4, -0.3, 0.9)[: j + 1]
            got = fam.eval_log(j, z, BIMODAL_QUARTIC, props)
            expected = (BIMODAL_QUARTIC.eval_log(z[0])
                        - props.eval_log(1, z[0], z[j], ()))
            assert got == pytest.approx(expected, abs=1e-12)

    def test_uniform_discrete(self):
        model = make_model(4, 3, uniform=True)
        fam = weight_w3()
        got = fam.eval_log(2, (1, 3, 0), model.target, model.props)
        assert got == pytest.approx(model.log_p[1] + math.log(4), abs=1e-12)

    def test_gaussian_sequence_smallest_arity(self):
        # j=1, z=(1.0, 0.0): conditioning on the anchor alone gives mu = 0
        fam = weight_w3()
        props = GaussianSequentialProposal()
        got = fam.eval_log(1, (1.0, 0.0), BIMODAL_QUARTIC, props)
        expected = BIMODAL_QUARTIC.eval_log(1.0) - gaussian_log_pdf(1.0, 0.0, 1.0)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_reversed_conditioning_order(self):
        # j=3, z=(z1, z2, z3, z4): conditioning sequence is (z4, z3, z2),
        # so mu = gamma1/2 * (z4 + z3) + gamma2 * z2
        fam = weight_w3()
        props = GaussianSequentialProposal()
        z = (0.5, -1.0, 2.0, 0.3)
        mu = 0.2 / 2 * (z[3] + z[2]) + 0.8 * z[1]
        expected = BIMODAL_QUARTIC.eval_log(z[0]) - gaussian_log_pdf(z[0], mu, 1.0)
        assert fam.eval_log(3, z, BIMODAL_QUARTIC, props) == pytest.approx(
            expected, abs=1e-12)

    def test_zero_proposal_density_is_contract_violation(self):
        model = make_model(3, 2, uniform=False)
        zeroed = dict(model.props.table)
        zeroed[(0,)] = np.array([0.0, 0.5, 0.5])
        props = type(model.props)(M=3, table=zeroed)
        fam = weight_w3()
        with pytest.raises(UnboundedWeightError):
            fam.eval_log(1, (0, 0), model.target, props)


class TestRatioTheta:
    def test_matches_w3_at_arity_one(self):
        # at j=1 both families divide p(z_1) by the same single conditional
        props = gaussian_random_walk(1.0)
        rt = weight_ratio_theta(1.0)
        w3 = weight_w3()
        for z in ((1.0, 0.0), (-0.4, 1.7)):
            assert rt.eval_log(1, z, BIMODAL_QUARTIC, props) == pytest.approx(
                w3.eval_log(1, z, BIMODAL_QUARTIC, props), abs=1e-12)

    def test_uniform_discrete(self):
        model = make_model(3, 3, uniform=True)
        rt = weight_ratio_theta(0.5)
        got = rt.eval_log(2, (1, 0, 2), model.target, model.props)
        assert got == pytest.approx(
            0.5 * (model.log_p[1] + 2 * math.log(3)), abs=1e-12)

    def test_linear_in_theta(self):
        props = GaussianSequentialProposal()
        z = (0.3, -0.8, 1.1)
        a = weight_ratio_theta(1.0).eval_log(2, z, BIMODAL_QUARTIC, props)
        b = weight_ratio_theta(2.0).eval_log(2, z, BIMODAL_QUARTIC, props)
        assert b == pytest.approx(2 * a, abs=1e-12)

    def test_temporal_order_inside_joint(self):
        # q_j conditions on the anchor and generates z_j, ..., z_1 in order
        props = GaussianSequentialProposal()
        z = (0.3, -0.8, 1.1)
        lq = log_joint_proposal(props, z[2], (z[1], z[0]), 2)
        expected = BIMODAL_QUARTIC.eval_log(z[0]) - lq
        got = weight_ratio_theta(1.0).eval_log(2, z, BIMODAL_QUARTIC, props)
        assert got == pytest.approx(expected, abs=1e-12)


class TestRatioProduct:
    def test_matches_ratio_theta_at_arity_one(self):
        props = GaussianSequentialProposal()
        rp = weight_ratio_product()
        rt = weight_ratio_theta(1.0)
        z = (0.9, -1.3)
        assert rp.eval_log(1, z, BIMODAL_QUARTIC, props) == pytest.approx(
            rt.eval_log(1, z, BIMODAL_QUARTIC, props), abs=1e-12)

    def test_uniform_discrete_arity_two(self):
        # q_1 contributes one factor of M, q_2 contributes two
        model = make_model(3, 3, uniform=True)
        rp = weight_ratio_product()
        got = rp.eval_log(2, (1, 2, 0), model.target, model.props)
        expected = model.log_p[2] + model.log_p[1] + 3 * math.log(3)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_arity_two_term_by_term(self):
        props = GaussianSequentialProposal()
        z = (0.4, -0.9, 1.2)
        t1 = (BIMODAL_QUARTIC.eval_log(z[1])
              - log_joint_proposal(props, z[2], (z[1],), 1))
        t2 = (BIMODAL_QUARTIC.eval_log(z[0])
              - log_joint_proposal(props, z[2], (z[1], z[0]), 2))
        got = weight_ratio_product().eval_log(2, z, BIMODAL_QUARTIC, props)
        assert got == pytest.approx(t1 + t2, abs=1e-12)


class TestLambdaFamily:
    def test_unit_lambda(self):
        props = GaussianSequentialProposal()
        fam = weight_lambda(UNIT_LAMBDA)
        z = (0.5, -0.2, 1.4)
        expected = (BIMODAL_QUARTIC.eval_log(z[0])
                    + log_joint_proposal(props, z[0], z[1:], 2))
        assert fam.eval_log(2, z, BIMODAL_QUARTIC, props) == pytest.approx(
            expected, abs=1e-12)

    def test_inverse_product_lambda_gives_ratio_form(self):
        # j=1 with lambda(x, y) = 1/(pi(y|x) pi(x|y)) on a shared symmetric
        # proposal: weight collapses to p(z_1)/pi(z_1|z_2)
        props = gaussian_random_walk(1.0)
        lam = LambdaFunction(
            lambda z1, rest: -(props.eval_log(1, rest[0], z1, ())
                               + props.eval_log(1, z1, rest[0], ())),
            declared_symmetric=True, name="inv-product")
        fam = weight_lambda(lam)
        for z in ((1.0, 0.2), (-0.7, 1.5)):
            expected = (BIMODAL_QUARTIC.eval_log(z[0])
                        - props.eval_log(1, z[0], z[1], ()))
            assert fam.eval_log(1, z, BIMODAL_QUARTIC, props) == pytest.approx(
                expected, abs=1e-12)

    def test_lambda_factor_sequential_symmetry(self):
        lam = LambdaFunction(lambda z1, rest: 0.1 * (z1 + sum(rest)),
                             declared_symmetric=True, name="sum")
        z1, rest = 0.4, (1.0, -0.3, 0.8)
        assert lam.eval_log(z1, rest) == pytest.approx(
            lam.eval_log_reversed(z1, rest), abs=1e-12)

    def test_nonpositive_lambda_rejected(self):
        lam = LambdaFunction.from_linear(lambda z1, rest: -1.0)
        with pytest.raises(UnboundedWeightError):
            lam.eval_log(0.0, (1.0,))


class TestCheckSequentialSymmetry:
    def test_constant_lambda(self, rng):
        assert check_sequential_symmetry(UNIT_LAMBDA, 50, rng) == 0.0

    def test_sum_lambda(self, rng):
        lam = LambdaFunction(lambda z1, rest: z1 + sum(rest))
        assert check_sequential_symmetry(lam, 50, rng) <= 1e-12

    def test_asymmetric_lambda_detected(self, rng):
        lam = LambdaFunction(lambda z1, rest: z1)
        assert check_sequential_symmetry(lam, 50, rng, arities=(1,)) > 0.0

    def test_trials_must_be_positive(self, rng):
        with pytest.raises(ValueError):
            check_sequential_symmetry(UNIT_LAMBDA, 0, rng)


class TestHomogeneity:
    """Under p -> c * p the log weight shifts by degree(j) * log c."""

    @pytest.mark.parametrize("family", all_families(),
                             ids=lambda f: f.family_id + str(f.params))
    def test_declared_shift_degree(self, family, rng):
        props = GaussianSequentialProposal()
        target = BIMODAL_QUARTIC
        log_c = 1.7
        scaled = target.scaled(log_c)
        for j in (1, 2, 3):
            z = tuple(float(v) for v in rng.normal(0.0, 1.5, size=j + 1))
            base = family.eval_log(j, z, target, props)
            shifted = family.eval_log(j, z, scaled, props)
            degree = family.log_shift_degree(j)
            assert shifted - base == pytest.approx(degree * log_c, abs=1e-9)

    def test_w2_degree_is_arity_dependent(self):
        fam = weight_w2()
        assert [fam.log_shift_degree(j) for j in (1, 2, 3)] == [2.0, 3.0, 4.0]

    def test_ratio_product_degree_is_arity(self):
        fam = weight_ratio_product()
        assert [fam.log_shift_degree(j) for j in (1, 2, 3)] == [1.0, 2.0, 3.0]

    def test_scale_free_families(self):
        assert weight_w3().log_shift_degree(5) == 1.0
        assert weight_lambda(UNIT_LAMBDA).log_shift_degree(5) == 1.0
        assert weight_w1(0.5).log_shift_degree(5) == 0.5
        assert weight_ratio_theta(2.0).log_shift_degree(5) == 2.0


class TestInterfaceContracts:
    def test_arity_argument_count_enforced(self):
        fam = weight_w1(1.0)
        with pytest.raises(ValueError):
            fam.eval_log(2, (1.0, 2.0), BIMODAL_QUARTIC)

    def test_neg_inf_only_off_support(self, rng):
        # interior points of a full-support model never map to -inf
        props = GaussianSequentialProposal()
        for family in all_families():
            sup = sampled_boundedness_check(family, quadratic_target(), props,
                                            rng, trials=50)
            assert math.isfinite(sup)

    def test_make_weight_family_round_trip(self):
        fam = make_weight_family("W1", {"theta": 0.25})
        assert fam.family_id == "W1" and fam.params["theta"] == 0.25
        assert make_weight_family("W2").family_id == "W2"
        assert make_weight_family("LAMBDA").is_lambda_form

    def test_make_weight_family_unknown_id(self):
        with pytest.raises(ConfigurationError):
            make_weight_family("W9")
