"""
Tests for the table-driven F_q / F_{q^s} arithmetic.

Run:
    pytest tests/test_finite_field.py -v
"""

import os
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.errors import FieldUnsupported
from drinfeld.finite_field import FieldContext, FieldParams, field_make, is_prime

CTX9 = field_make(FieldParams(3, 1, 2, 4))
ELEMENTS9 = st.integers(min_value=0, max_value=8)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

class TestFieldParams:
    def test_q_and_order(self):
        params = FieldParams(2, 2, 3, 1)
        assert params.q == 4
        assert params.degree == 6
        assert params.order == 64

    def test_is_prime(self):
        assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]

    def test_non_prime_p_rejected(self):
        with pytest.raises(FieldUnsupported):
            field_make(FieldParams(4))

    def test_oversized_field_rejected(self):
        with pytest.raises(FieldUnsupported):
            field_make(FieldParams(2, 17))

    def test_zero_ramification_rejected(self):
        with pytest.raises(FieldUnsupported):
            field_make(FieldParams(3, 1, 2, 0))

    def test_contexts_compare_by_params(self):
        assert FieldContext(FieldParams(3, 1, 2, 4)) == CTX9
        assert FieldContext(FieldParams(3, 1, 2, 2)) != CTX9


# ---------------------------------------------------------------------------
# Scalar arithmetic
# ---------------------------------------------------------------------------

class TestScalarArithmetic:
    def setup_method(self):
        self.ctx = CTX9

    def test_inverse(self):
        for a in range(1, self.ctx.order):
            assert self.ctx.mul(a, self.ctx.inv(a)) == 1

    def test_inverse_of_zero(self):
        with pytest.raises(ZeroDivisionError):
            self.ctx.inv(0)

    def test_negation(self):
        for a in range(self.ctx.order):
            assert self.ctx.add(a, self.ctx.neg(a)) == 0

    def test_frobenius_has_order_s(self):
        for a in range(self.ctx.order):
            assert self.ctx.frob(self.ctx.frob(a)) == a

    def test_frobenius_fixes_fq(self):
        for a in self.ctx.fq_elements():
            assert self.ctx.frob(a) == a

    def test_fq_elements_are_the_prime_field(self):
        assert self.ctx.fq_elements() == [0, 1, 2]
        assert all(self.ctx.in_fq(a) for a in (0, 1, 2))
        assert not any(self.ctx.in_fq(a) for a in range(3, 9))

    def test_carlitz_root_of_minus_one(self):
        assert self.ctx.zeta is not None
        assert self.ctx.pow(self.ctx.zeta, self.ctx.q - 1) == self.ctx.minus_one
        assert self.ctx.has_carlitz_root()

    def test_no_carlitz_root_without_extension(self):
        ctx = field_make(FieldParams(3, 1, 1, 4))
        assert ctx.zeta is None
        assert not ctx.has_carlitz_root()

    def test_characteristic_two_addition_is_xor(self):
        ctx = field_make(FieldParams(2, 1, 3, 1))
        for a in range(8):
            for b in range(8):
                assert ctx.add(a, b) == a ^ b

    def test_element_reduces_mod_p(self):
        assert self.ctx.element(-1) == 2
        assert self.ctx.element(7) == 1

    def test_root_finds_square_roots(self):
        for a in range(1, 9):
            sq = self.ctx.mul(a, a)
            r = self.ctx.root(sq, 2)
            assert self.ctx.mul(r, r) == sq

    @pytest.mark.parametrize("params", [FieldParams(3, 1, 2, 4), FieldParams(2, 1, 4, 1),
                                        FieldParams(5, 1, 2, 1)])
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 6])
    def test_root_is_least_solution(self, params, k):
        ctx = field_make(params)
        for c in range(ctx.order):
            solutions = [a for a in range(ctx.order) if ctx.pow(a, k) == c]
            assert ctx.root(c, k) == (min(solutions) if solutions else None)

    def test_root_index_must_be_positive(self):
        with pytest.raises(ValueError):
            self.ctx.root(1, 0)


class TestFieldLaws:
    @settings(max_examples=60, deadline=None)
    @given(ELEMENTS9, ELEMENTS9, ELEMENTS9)
    def test_distributive(self, a, b, c):
        ctx = CTX9
        assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))

    @settings(max_examples=60, deadline=None)
    @given(ELEMENTS9, ELEMENTS9)
    def test_frobenius_is_additive(self, a, b):
        ctx = CTX9
        assert ctx.frob(ctx.add(a, b)) == ctx.add(ctx.frob(a), ctx.frob(b))


# ---------------------------------------------------------------------------
# Digit arrays
# ---------------------------------------------------------------------------

class TestDigitHelpers:
    def setup_method(self):
        self.ctx = CTX9

    def test_digit_round_trip(self):
        values = np.arange(self.ctx.order)
        assert list(self.ctx.from_digits(self.ctx.to_digits(values))) == list(values)

    def test_scale_digits_matches_mul(self):
        arr = self.ctx.to_digits(list(range(9)))
        for c in range(1, 9):
            scaled = self.ctx.from_digits(self.ctx.scale_digits(arr, c))
            assert list(scaled) == [self.ctx.mul(a, c) for a in range(9)]

    def test_frobenius_digits_matches_frob(self):
        arr = self.ctx.to_digits(list(range(9)))
        got = self.ctx.from_digits(self.ctx.frobenius_digits(arr, 1))
        assert list(got) == [self.ctx.frob(a) for a in range(9)]

    def test_fq_basis_size(self):
        ctx = field_make(FieldParams(2, 2, 2, 3))
        assert len(ctx.fq_basis()) == 2
