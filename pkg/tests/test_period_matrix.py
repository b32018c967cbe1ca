"""
Tests for period matrices and the Legendre determinant.

Run:
    pytest tests/test_period_matrix.py -v
"""

import os
import sys
from fractions import Fraction

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.carlitz import carlitz_period, theta
from drinfeld.drinfeld_module import DrinfeldModule
from drinfeld.errors import NotAPeriod
from drinfeld.finite_field import FieldParams, field_make
from drinfeld.period_matrix import (
    PeriodMatrix,
    determinant,
    legendre_check,
    period_matrix,
    permutation_sign,
)
from drinfeld.series import RamifiedSeries

CTX = field_make(FieldParams(3, 1, 2, 4), 40)
PREC = 30


class TestDeterminant:
    @pytest.mark.parametrize(
        "perm,sign",
        [((0, 1, 2), 1), ((1, 0, 2), -1), ((1, 2, 0), 1), ((2, 1, 0), -1)],
    )
    def test_permutation_sign(self, perm, sign):
        assert permutation_sign(perm) == sign

    def test_two_by_two(self):
        one = RamifiedSeries.one(CTX)
        th = theta(CTX)
        det = determinant(((th, one), (one, th)))
        assert det == th * th - 1


class TestPeriodMatrix:
    def setup_method(self):
        self.carlitz = DrinfeldModule.carlitz(CTX)
        self.pi = carlitz_period(CTX, PREC + 16)

    def test_carlitz_matrix(self):
        P = period_matrix(self.carlitz, [self.pi], 6, PREC)
        assert P.rank == 1
        assert P.entries[0][0] == -self.pi

    def test_wrong_basis_length(self):
        with pytest.raises(ValueError):
            period_matrix(self.carlitz, [self.pi, self.pi], 6, PREC)

    def test_non_period_rejected(self):
        with pytest.raises(NotAPeriod):
            period_matrix(self.carlitz, [theta(CTX)], 6, PREC)

    def test_legendre_carlitz(self):
        P = period_matrix(self.carlitz, [self.pi], 6, PREC)
        cert = legendre_check(P, self.pi, d=2, h=1, v_t=Fraction(PREC, 2))
        assert cert.describe() == "X + (1)"

    def test_legendre_rank_limit(self):
        one = RamifiedSeries.one(CTX)
        rows = tuple(tuple(one for _ in range(3)) for _ in range(3))
        P = PeriodMatrix(rows, (one, one, one), Fraction(PREC))
        with pytest.raises(ValueError):
            legendre_check(P, self.pi)
