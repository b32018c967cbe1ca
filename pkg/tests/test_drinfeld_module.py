"""
Tests for Drinfeld modules and their exponential, logarithm and
quasi-periodic series.

Run:
    pytest tests/test_drinfeld_module.py -v
"""

import os
import sys
from fractions import Fraction
from random import Random

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.drinfeld_module import (
    DrinfeldModule,
    entire_eval,
    exp_coeffs,
    exp_residuals,
    log_coeffs,
    log_exp_residuals,
    min_residual,
    quasi_period_coeffs,
    quasi_residuals,
)
from drinfeld.errors import TailBoundError
from drinfeld.finite_field import FieldParams, field_make
from drinfeld.series import RamifiedSeries
from drinfeld.suites import random_modules
from drinfeld.theta_poly import ThetaPoly

CTX = field_make(FieldParams(3, 1, 2, 4), 40)
CARLITZ = DrinfeldModule.carlitz(CTX)
REL = 30


# ---------------------------------------------------------------------------
# Module construction
# ---------------------------------------------------------------------------

class TestDrinfeldModule:
    def test_carlitz(self):
        assert CARLITZ.rank == 1
        assert CARLITZ.coefficient(0).valuation == -1
        assert CARLITZ.coefficient(2).is_zero()

    def test_zero_top_coefficient_rejected(self):
        with pytest.raises(ValueError):
            DrinfeldModule(CTX, (RamifiedSeries.one(CTX), RamifiedSeries.zero(CTX)))


# ---------------------------------------------------------------------------
# Series coefficients
# ---------------------------------------------------------------------------

class TestCarlitzSeries:
    def test_exp_valuations(self):
        exp = exp_coeffs(CARLITZ, 3, REL)
        assert exp.valuations()[:3] == [0, 3, 18]

    def test_log_valuations(self):
        log = log_coeffs(CARLITZ, 3, REL)
        assert log.valuations()[:3] == [0, 3, 12]

    def test_exp_of_small_argument(self):
        exp = exp_coeffs(CARLITZ, 8, REL)
        x = RamifiedSeries.theta_power(CTX, -1)
        assert entire_eval(exp, x, 20).valuation == 1

    def test_tail_bound_refuses_large_arguments(self):
        exp = exp_coeffs(CARLITZ, 2, REL)
        with pytest.raises(TailBoundError):
            entire_eval(exp, RamifiedSeries.theta_power(CTX, 10), 20)


class TestFunctionalEquations:
    def setup_method(self):
        self.modules = random_modules(CTX, 4, Random(3))

    def test_exp_residuals(self):
        for phi in self.modules:
            exp = exp_coeffs(phi, 8, REL)
            assert min_residual(exp_residuals(phi, exp, REL)) >= 20

    def test_log_inverts_exp(self):
        for phi in self.modules:
            exp = exp_coeffs(phi, 8, REL)
            log = log_coeffs(phi, 8, REL)
            assert min_residual(log_exp_residuals(exp, log, REL)) >= 20

    def test_quasi_periodic_functions(self):
        for phi in self.modules:
            exp = exp_coeffs(phi, 8, REL)
            for i in range(phi.rank):
                quasi = quasi_period_coeffs(phi, i, 8, exp=exp, rel_prec=REL)
                assert min_residual(quasi_residuals(phi, i, quasi, exp, REL)) >= 20

    def test_quasi_index_out_of_range(self):
        with pytest.raises(ValueError):
            quasi_period_coeffs(CARLITZ, 1, 4)

    def test_first_quasi_function_is_exp_minus_identity(self):
        exp = exp_coeffs(CARLITZ, 4, REL)
        quasi = quasi_period_coeffs(CARLITZ, 0, 4, exp=exp, rel_prec=REL)
        assert quasi.coeffs[0].is_zero()
        assert quasi.coeffs[2] == exp.coeffs[2]
        assert quasi.coeffs[1].valuation == Fraction(3)


# ---------------------------------------------------------------------------
# Cancelling recursion sums
# ---------------------------------------------------------------------------

class TestCancellation:
    """phi_t = theta + tau + tau^2 over F_3: the leading terms of the alpha_5
    recursion cancel far past a relative precision of 96."""

    def setup_method(self):
        one = ThetaPoly.constant(CTX, 1)
        self.phi = DrinfeldModule.from_polys(CTX, [one, one])
        self.rel = 96

    def test_exp_coefficients_keep_relative_precision(self):
        exp = exp_coeffs(self.phi, 8, self.rel)
        for c in exp.coeffs[:6]:
            assert not c.is_zero()
            assert c.is_exact() or c.precision - c.valuation >= self.rel

    def test_cancelled_coefficient_is_small(self):
        exp = exp_coeffs(self.phi, 8, self.rel)
        assert exp.coeffs[5].valuation > 825

    def test_exp_residuals_pass(self):
        exp = exp_coeffs(self.phi, 8, self.rel)
        assert min_residual(exp_residuals(self.phi, exp, self.rel)) >= 48

    def test_quasi_residuals_pass(self):
        exp = exp_coeffs(self.phi, 8, self.rel)
        for i in range(self.phi.rank):
            quasi = quasi_period_coeffs(self.phi, i, 8, exp=exp, rel_prec=self.rel)
            assert min_residual(quasi_residuals(self.phi, i, quasi, exp, self.rel)) >= 48

    def test_log_inverts_exp(self):
        exp = exp_coeffs(self.phi, 8, self.rel)
        log = log_coeffs(self.phi, 8, self.rel)
        assert min_residual(log_exp_residuals(exp, log, self.rel)) >= 48

    def test_imprecise_inputs_stop_refinement(self):
        # g_1 known to 4 digits past its leading one: no working precision helps
        g1 = (ThetaPoly.theta(CTX) + 1).to_series().truncate(3)
        phi = DrinfeldModule(CTX, (g1, RamifiedSeries.one(CTX)))
        exp = exp_coeffs(phi, 4, REL)
        assert exp.coeffs[1].precision - exp.coeffs[1].valuation < REL
