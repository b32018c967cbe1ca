"""
Tests for the Carlitz period and its ramified root.

Run:
    pytest tests/test_carlitz.py -v
"""

import os
import sys
from fractions import Fraction

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.carlitz import carlitz_period, carlitz_root, period_factor_count, theta
from drinfeld.drinfeld_module import DrinfeldModule, entire_eval
from drinfeld.errors import FieldUnsupported
from drinfeld.finite_field import FieldParams, field_make
from drinfeld.period_matrix import exp_for_points
from drinfeld.series import RamifiedSeries

CTX = field_make(FieldParams(3, 1, 2, 4), 40)


class TestCarlitzRoot:
    def test_root_power(self):
        root = carlitz_root(CTX)
        assert root ** 2 == -theta(CTX)

    def test_no_root_of_minus_one(self):
        ctx = field_make(FieldParams(3, 1, 1, 2))
        with pytest.raises(FieldUnsupported):
            carlitz_root(ctx)

    def test_ramification_too_small(self):
        ctx = field_make(FieldParams(3, 1, 2, 1))
        with pytest.raises(FieldUnsupported):
            carlitz_root(ctx)


class TestCarlitzPeriod:
    def test_absolute_value_q3(self):
        pi = carlitz_period(CTX, 30)
        assert pi.abs_exponent() == Fraction(3, 2)
        assert pi.precision >= 30

    def test_absolute_value_q2(self):
        ctx = field_make(FieldParams(2, 1, 1, 1))
        assert carlitz_period(ctx, 20).abs_exponent() == 2

    def test_exp_kills_period(self):
        prec = 30
        pi = carlitz_period(CTX, prec)
        exp = exp_for_points(DrinfeldModule.carlitz(CTX), [pi], 6, prec)
        assert entire_eval(exp, pi, prec).val_bound() >= Fraction(3, 5) * prec

    def test_factor_count(self):
        assert period_factor_count(CTX, 30) == 3

    def test_truncated_product_lowers_precision(self):
        full = carlitz_period(CTX, 30)
        short = carlitz_period(CTX, 30, i_max=1)
        assert short.precision == Fraction(13, 2)
        assert short.agrees_with(full)

    def test_period_of_ramified_generator(self):
        y = RamifiedSeries.theta_power(CTX, Fraction(1, 2))
        pi_y = carlitz_period(CTX, 20, y=y)
        assert pi_y.abs_exponent() == Fraction(3, 4)

    def test_generator_must_be_large(self):
        with pytest.raises(FieldUnsupported):
            carlitz_period(CTX, 10, y=RamifiedSeries.theta_power(CTX, -1))
