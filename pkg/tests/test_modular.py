"""
Tests for the GL_r(A) action, automorphy checks, reciprocal polynomials
and arithmetic normalization.

Run:
    pytest tests/test_modular.py -v
"""

import os
import sys
from random import Random

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.carlitz import carlitz_period, theta
from drinfeld.eisenstein import EisensteinSpec, eisenstein_rel
from drinfeld.errors import ConfigError
from drinfeld.finite_field import FieldParams, field_make
from drinfeld.lattice import UpperHalfPoint, cm_point
from drinfeld.modular import (
    GLrMatrix,
    SlashContext,
    act,
    arithmetic_normalize,
    automorphy_check,
    cocycle_residual,
    eisenstein_expansion_check,
    level_change_check,
    reciprocal_poly,
    sample_gamma_N,
    u_parameter,
)
from drinfeld.series import INF, RamifiedSeries
from drinfeld.theta_poly import ThetaPoly

CTX = field_make(FieldParams(3, 1, 2, 4), 40)
THETA = ThetaPoly.theta(CTX)


# ---------------------------------------------------------------------------
# GL_r(A) and Gamma(N)
# ---------------------------------------------------------------------------

class TestGLrMatrix:
    def test_identity(self):
        I = GLrMatrix.identity(CTX, 3)
        assert I.det() == ThetaPoly.constant(CTX, 1)
        assert I.is_identity()

    def test_elementary_in_gamma(self):
        g = GLrMatrix.elementary(CTX, 2, 0, 1, THETA)
        assert g.is_invertible()
        assert g.in_gamma(THETA)
        assert not g.in_gamma(THETA + 1)

    def test_elementary_needs_distinct_indices(self):
        with pytest.raises(ValueError):
            GLrMatrix.elementary(CTX, 2, 1, 1, THETA)

    def test_product_and_describe(self):
        a = GLrMatrix.elementary(CTX, 2, 0, 1, THETA)
        b = GLrMatrix.elementary(CTX, 2, 0, 1, THETA.scale(2))
        assert (a * b).is_identity()
        assert a.describe() == "[1, θ; 0, 1]"

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            GLrMatrix(((THETA, THETA),))

    def test_sampled_elements_lie_in_gamma(self):
        rng = Random(11)
        for _ in range(5):
            gamma = sample_gamma_N(CTX, THETA, 2, rng, degree=1)
            assert gamma.in_gamma(THETA)


# ---------------------------------------------------------------------------
# Action, cocycle and slash operator
# ---------------------------------------------------------------------------

class TestAction:
    def setup_method(self):
        self.omega = cm_point("sqrt_theta", CTX, 40).point

    def test_identity_action(self):
        moved, j = act(GLrMatrix.identity(CTX, 2), self.omega, 20)
        assert j == RamifiedSeries.one(CTX)
        assert moved.coords[0].agrees_with(self.omega.coords[0])

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            act(GLrMatrix.identity(CTX, 3), self.omega, 20)

    def test_cocycle(self):
        g = GLrMatrix.elementary(CTX, 2, 1, 0, THETA)
        h = GLrMatrix.elementary(CTX, 2, 0, 1, THETA + 1)
        assert cocycle_residual(g, h, self.omega, 20) >= 10

    def test_slash_rejects_non_units(self):
        singular = GLrMatrix.from_ints(CTX, [[1, 0], [0, 0]])
        one = RamifiedSeries.one(CTX)
        with pytest.raises(ValueError):
            SlashContext(1).apply(one, singular, one, 10)

    def test_constant_is_weight_zero_invariant(self):
        gammas = [GLrMatrix.identity(CTX, 2), GLrMatrix.elementary(CTX, 2, 1, 0, THETA)]
        results = automorphy_check(
            lambda omega: RamifiedSeries.one(CTX), SlashContext(0), gammas, [self.omega], 20, 0.8
        )
        assert len(results) == 2
        assert all(r.passed and r.residual == INF for r in results)

    def test_eisenstein_automorphy_after_moving_the_point(self):
        # both gammas move omega to a point whose lattice basis is not reduced
        spec = EisensteinSpec.from_text(CTX, "1/θ,0", "θ")
        pi = carlitz_period(CTX, 60)
        gammas = [GLrMatrix.elementary(CTX, 2, 0, 1, THETA), GLrMatrix.elementary(CTX, 2, 1, 0, THETA)]
        results = automorphy_check(
            lambda omega: eisenstein_rel(spec, omega, 24, 5, pi).value, SlashContext(1, 0), gammas,
            [self.omega], 20, 0.6,
        )
        assert len(results) == 2
        assert all(r.passed for r in results)


# ---------------------------------------------------------------------------
# Parameter at infinity and reciprocal polynomials
# ---------------------------------------------------------------------------

class TestParameterAtInfinity:
    def test_u_needs_rank_two(self):
        with pytest.raises(ValueError):
            u_parameter(THETA, UpperHalfPoint.from_coords(CTX, []), 10)

    def test_carlitz_reciprocal_poly(self):
        rp = reciprocal_poly(THETA, UpperHalfPoint.from_coords(CTX, []))
        assert rp.d == 1
        assert rp.coefficient(0) == RamifiedSeries.one(CTX)
        assert rp.coefficient(CTX.q - 1) == theta(CTX)

    def test_reciprocal_poly_of_zero(self):
        with pytest.raises(ValueError):
            reciprocal_poly(ThetaPoly(CTX, ()), UpperHalfPoint.from_coords(CTX, []))

    def test_level_change_same_level(self):
        omega = cm_point("sqrt_theta", CTX, 40).point
        result = level_change_check(THETA, THETA, omega, 20, 0.8)
        assert result.passed
        assert result.residual == INF

    def test_level_change_needs_divisibility(self):
        omega = cm_point("sqrt_theta", CTX, 40).point
        with pytest.raises(ConfigError):
            level_change_check(THETA ** 2, THETA + 1, omega, 20, 0.8)

    def test_expansion_needs_matching_rank(self):
        spec = EisensteinSpec.from_text(CTX, "1/θ,0,0", "θ")
        omega = cm_point("sqrt_theta", CTX, 40).point
        with pytest.raises(ConfigError):
            eisenstein_expansion_check(spec, omega, 20, 0.6)


class TestArithmeticNormalize:
    def setup_method(self):
        self.pi = carlitz_period(CTX, 30)

    def test_weight_zero_form_unchanged(self):
        value = theta(CTX)
        assert arithmetic_normalize("g_form", value, self.pi, 0) == value

    def test_eisenstein_divides_by_period(self):
        scaled = arithmetic_normalize("eisenstein", self.pi, self.pi)
        assert (scaled - 1).val_bound() >= 20

    def test_g_form_scaling(self):
        scaled = arithmetic_normalize("g_form", RamifiedSeries.one(CTX), self.pi, 1)
        assert scaled.abs_exponent() == -(CTX.q - 1) * self.pi.abs_exponent()

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            arithmetic_normalize("h_form", self.pi, self.pi)
