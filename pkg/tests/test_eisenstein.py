"""
Tests for Eisenstein series of weight one.

Run:
    pytest tests/test_eisenstein.py -v
"""

import os
import sys

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.carlitz import carlitz_period, theta
from drinfeld.eisenstein import EisensteinSpec, eisenstein_eval, eisenstein_rel
from drinfeld.errors import ConfigError
from drinfeld.finite_field import FieldParams, field_make
from drinfeld.lattice import UpperHalfPoint, cm_point
from drinfeld.modular import logder_check, relative_residual
from drinfeld.theta_poly import ThetaPoly

CTX = field_make(FieldParams(3, 1, 2, 4), 40)
THETA = ThetaPoly.theta(CTX)
ONE = ThetaPoly.constant(CTX, 1)
ZERO = ThetaPoly(CTX, ())


# ---------------------------------------------------------------------------
# EisensteinSpec
# ---------------------------------------------------------------------------

class TestEisensteinSpec:
    def test_level_must_be_monic(self):
        with pytest.raises(ConfigError):
            EisensteinSpec(THETA.scale(2), (ONE, ZERO))

    def test_u_must_be_nonzero(self):
        with pytest.raises(ConfigError):
            EisensteinSpec(THETA, (THETA, ZERO))

    def test_from_text(self):
        spec = EisensteinSpec.from_text(CTX, "1/θ,0", "θ")
        assert spec.v == (ONE, ZERO)
        assert spec.describe() == "(1)/(θ),(0)/(θ)"

    def test_from_text_scales_numerators(self):
        spec = EisensteinSpec.from_text(CTX, "1,1/θ", "θ^2")
        assert spec.v == (THETA ** 2, THETA)

    def test_denominator_must_divide_level(self):
        with pytest.raises(ConfigError):
            EisensteinSpec.from_text(CTX, "1/θ^2,0", "θ")

    def test_shifted(self):
        spec = EisensteinSpec(THETA, (ONE, ZERO)).shifted(0, ONE)
        assert spec.v[0] == THETA + 1


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class TestEisensteinValues:
    def setup_method(self):
        self.omega = cm_point("sqrt_theta", CTX, 40).point
        self.spec = EisensteinSpec(THETA, (ONE, ZERO))
        self.pi = carlitz_period(CTX, 60)

    def test_invariant_under_lattice_shift(self):
        base = eisenstein_rel(self.spec, self.omega, 20, pi_tilde=self.pi)
        moved = eisenstein_rel(self.spec.shifted(0, THETA), self.omega, 20, pi_tilde=self.pi)
        assert relative_residual(moved.value, base.value) >= 10

    def test_absolute_and_relative_agree(self):
        rel = eisenstein_rel(self.spec, self.omega, 20, pi_tilde=self.pi)
        absolute = eisenstein_eval(self.spec, self.omega, rel.value.valuation + 20, pi_tilde=self.pi)
        assert absolute.method == "layers"
        assert relative_residual(absolute.value, rel.value) >= 10

    def test_partial_sum_is_reciprocal_exponential(self):
        z = self.spec.u_dot(self.omega, 30)
        result = logder_check(self.omega.lattice(), z, 2, 20, 0.5)
        assert result.passed

    def test_rank_mismatch(self):
        rank_one = UpperHalfPoint.from_coords(CTX, [])
        with pytest.raises(ConfigError):
            eisenstein_eval(self.spec, rank_one, 10)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            eisenstein_eval(self.spec, self.omega, 10, method="series")

    def test_direct_reports_tail(self):
        value = eisenstein_eval(self.spec, self.omega, 10, method="direct", degree=1)
        assert value.method == "direct"
        assert value.degree == 1
        assert value.to_json()["method"] == "direct"

    def test_theta_helper_matches_poly(self):
        assert THETA.to_series() == theta(CTX)
