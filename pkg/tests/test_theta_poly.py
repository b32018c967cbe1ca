"""
Tests for ThetaPoly: parsing, formatting, division and enumeration.

Run:
    pytest tests/test_theta_poly.py -v
"""

import os
import sys
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.finite_field import FieldParams, field_make
from drinfeld.series import RamifiedSeries
from drinfeld.theta_poly import ThetaPoly, format_poly, parse_poly, polys_below, random_poly

CTX = field_make(FieldParams(3, 1, 2, 4), 40)
THETA = ThetaPoly.theta(CTX)

polys = st.lists(st.integers(min_value=0, max_value=2), max_size=5).map(
    lambda cs: ThetaPoly(CTX, tuple(cs))
)


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------

class TestParseAndFormat:
    def test_parse_square(self):
        assert parse_poly(CTX, "θ^2 + 2θ + 1") == (THETA + 1) ** 2

    def test_parse_ascii_variants(self):
        assert parse_poly(CTX, "t**3-1") == THETA ** 3 - 1
        assert parse_poly(CTX, "theta") == THETA

    def test_coefficients_reduce_mod_p(self):
        assert parse_poly(CTX, "4θ") == THETA

    def test_format(self):
        assert format_poly(THETA) == "θ"
        assert format_poly(THETA ** 2 + THETA.scale(2) + 1) == "θ^2 + 2θ + 1"
        assert format_poly(ThetaPoly(CTX, ())) == "0"
        assert str(THETA + 1) == "θ + 1"

    @pytest.mark.parametrize("text", ["θ^x", "θ + + *", "y^2"])
    def test_rejects_garbage(self, text):
        with pytest.raises(ValueError):
            parse_poly(CTX, text)

    def test_format_parse_agree(self):
        a = THETA ** 4 + THETA.scale(2) + 2
        assert parse_poly(CTX, format_poly(a)) == a


# ---------------------------------------------------------------------------
# Division
# ---------------------------------------------------------------------------

class TestDivision:
    def test_exact_division(self):
        a = THETA ** 3 + 1
        assert (THETA + 1).divides(a)
        assert a // (THETA + 1) == (THETA + 1) ** 2

    def test_remainder(self):
        q, r = (THETA ** 2 + 1).divmod(THETA)
        assert q == THETA
        assert r == ThetaPoly.constant(CTX, 1)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            THETA.divmod(ThetaPoly(CTX, ()))

    def test_degree_and_monic(self):
        assert ThetaPoly(CTX, ()).degree == -1
        assert THETA.is_monic()
        assert not THETA.scale(2).is_monic()


# ---------------------------------------------------------------------------
# Series image and enumeration
# ---------------------------------------------------------------------------

class TestSeriesAndEnumeration:
    def test_to_series_valuation(self):
        x = (THETA ** 2 + 1).to_series()
        assert x.valuation == -2
        assert x.is_exact()

    def test_evaluate_matches_to_series(self):
        a = THETA ** 3 + THETA.scale(2) + 1
        theta = RamifiedSeries.theta_power(CTX, 1)
        assert a.evaluate(theta) == a.to_series()

    def test_polys_below(self):
        listed = list(polys_below(CTX, 2))
        assert len(listed) == 9
        assert listed[0].is_zero()
        assert len(set(listed)) == 9

    def test_random_poly_degree(self):
        rng = Random(5)
        for degree in range(4):
            a = random_poly(CTX, degree, rng)
            assert a.degree == degree
            assert random_poly(CTX, degree, rng, monic=True).is_monic()

    def test_random_poly_is_seeded(self):
        assert random_poly(CTX, 3, Random(9)) == random_poly(CTX, 3, Random(9))


class TestRingLaws:
    @settings(max_examples=50, deadline=None)
    @given(polys, polys, polys)
    def test_distributive(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @settings(max_examples=50, deadline=None)
    @given(polys, polys)
    def test_division_identity(self, a, b):
        if b.is_zero():
            return
        q, r = a.divmod(b)
        assert q * b + r == a
        assert r.degree < b.degree
