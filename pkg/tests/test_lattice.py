"""
Tests for lattices, the upper half plane test, lattice exponentials and
CM points.

Run:
    pytest tests/test_lattice.py -v
"""

import os
import sys
from fractions import Fraction

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.carlitz import carlitz_period, theta
from drinfeld.errors import FieldUnsupported, NotInOmega, PoleError
from drinfeld.finite_field import FieldParams, field_make
from drinfeld.lattice import (
    LatticeSpec,
    UpperHalfPoint,
    cm_point,
    drinfeld_from_lattice,
    imag_abs,
    _layers_needed,
    lattice_exp_product,
    lattice_exp_value,
    omega_r_check,
    projective_vectors,
    subspace_exp,
)
from drinfeld.series import RamifiedSeries

CTX = field_make(FieldParams(3, 1, 2, 4), 40)


# ---------------------------------------------------------------------------
# Points and the upper half plane
# ---------------------------------------------------------------------------

class TestPoints:
    def test_imag_abs(self):
        assert imag_abs(RamifiedSeries.theta_power(CTX, Fraction(1, 2))) == Fraction(1, 2)
        assert imag_abs(theta(CTX) + 1) is None
        assert imag_abs(RamifiedSeries.zero(CTX)) is None

    def test_last_coordinate_must_be_one(self):
        with pytest.raises(ValueError):
            UpperHalfPoint(CTX, (theta(CTX),))

    def test_pair(self):
        omega = UpperHalfPoint.from_coords(CTX, [theta(CTX)])
        assert omega.pair([1, 1]) == theta(CTX) + 1

    def test_tail(self):
        omega = cm_point("kummer:4", CTX, 20).point
        assert omega.tail().rank == 3

    def test_sqrt_theta_in_omega(self):
        cert = omega_r_check(cm_point("sqrt_theta", CTX, 20).point, 4)
        assert cert.degree == 4
        assert cert.tested == 3 ** 8 - 1

    def test_rational_point_rejected(self):
        with pytest.raises(NotInOmega):
            omega_r_check(UpperHalfPoint.from_coords(CTX, [theta(CTX)]), 2)

    def test_budget_lowers_degree(self):
        cert = omega_r_check(cm_point("sqrt_theta", CTX, 20).point, 4, budget=100)
        assert cert.degree == 2

    def test_projective_vectors(self):
        vectors = list(projective_vectors(CTX, 2))
        assert len(vectors) == 4
        assert all(next(c for c in b if c) == 1 for b in vectors)


# ---------------------------------------------------------------------------
# Exponentials of subspaces and lattices
# ---------------------------------------------------------------------------

class TestLatticeExponential:
    def test_subspace_of_constants(self):
        exp = subspace_exp(CTX, [RamifiedSeries.one(CTX)], 20)
        assert exp.coeffs[0] == RamifiedSeries.one(CTX)
        assert exp.coeffs[1].agrees_with(RamifiedSeries.constant(CTX, 2))

    def test_dependent_vector_is_a_pole(self):
        one = RamifiedSeries.one(CTX)
        with pytest.raises(PoleError):
            subspace_exp(CTX, [one, one.scale(2)], 20)

    def test_layers_match_product(self):
        lattice = cm_point("sqrt_theta", CTX, 30).point.lattice()
        layers = lattice_exp_product(lattice, 1, 20, method="layers")
        product = lattice_exp_product(lattice, 1, 20, method="product")
        for a, b in zip(layers.coeffs, product.coeffs):
            assert (a - b).val_bound() >= a.valuation + 10

    def test_unknown_method(self):
        lattice = LatticeSpec(CTX, (RamifiedSeries.one(CTX),))
        with pytest.raises(ValueError):
            lattice_exp_product(lattice, 1, 10, method="fft")

    def test_carlitz_from_its_period_lattice(self):
        pi = carlitz_period(CTX, 40)
        phi = drinfeld_from_lattice(LatticeSpec(CTX, (pi,)), 3, 20)
        assert phi.rank == 1
        assert phi.g[0].valuation == 0
        assert phi.g[0].leading() == 1

    def test_homothety_scales_coefficients(self):
        # lattice c*L gives g_k -> c^(1 - q^k) g_k; here c = theta, q = 3
        pi = carlitz_period(CTX, 40)
        phi = drinfeld_from_lattice(LatticeSpec(CTX, (pi,)).scaled(theta(CTX)), 3, 20)
        assert phi.g[0].valuation == 2
        assert phi.g[0].leading() == 1


# ---------------------------------------------------------------------------
# Basis reduction and lattice values
# ---------------------------------------------------------------------------

class TestReduction:
    def setup_method(self):
        self.root = RamifiedSeries.theta_power(CTX, Fraction(1, 2))
        self.one = RamifiedSeries.one(CTX)
        # (theta^(1/2) + theta, 1): theta * 1 cancels the leading term of the first vector
        self.skewed = LatticeSpec(CTX, (self.root + theta(CTX), self.one))

    def test_reduced_valuations(self):
        reduced = self.skewed.reduced()
        assert sorted(w.valuation for w in reduced.basis) == [Fraction(-1, 2), 0]
        assert reduced.basis[0] == self.root

    def test_reduced_basis_is_kept(self):
        lattice = LatticeSpec(CTX, (self.root, self.one))
        assert lattice.reduced() is lattice

    def test_zero_vector_rejected(self):
        with pytest.raises(NotInOmega):
            LatticeSpec(CTX, (self.one, RamifiedSeries.zero(CTX))).reduced()

    def test_dependent_basis_rejected(self):
        with pytest.raises(NotInOmega):
            LatticeSpec(CTX, (self.one, self.one.scale(2))).reduced()

    def test_value_independent_of_basis(self):
        z = RamifiedSeries.theta_power(CTX, Fraction(-1, 4))
        a = lattice_exp_value(self.skewed, z, 20, 5).value
        b = lattice_exp_value(LatticeSpec(CTX, (self.root, self.one)), z, 20, 5).value
        assert (a - b).val_bound() >= a.valuation + 20

    def test_module_from_skewed_basis(self):
        phi = drinfeld_from_lattice(self.skewed, 3, 20)
        assert phi.rank == 2


class TestLayerCount:
    def test_layers_needed_extrapolates(self):
        assert _layers_needed(5, Fraction(40), Fraction(24), Fraction(80)) == 8

    def test_layers_needed_on_a_stalled_tail(self):
        assert _layers_needed(5, Fraction(40), Fraction(40), Fraction(80)) is None
        assert _layers_needed(1, Fraction(40), None, Fraction(80)) is None

    def test_small_q_goes_past_the_budget(self):
        ctx = field_make(FieldParams(2, 1, 2, 2), 40)
        root = RamifiedSeries.theta_power(ctx, Fraction(1, 2))
        pi = carlitz_period(ctx, 160)
        # u_theta at theta^(1/2): e_{pi A}(pi w_1 / theta), q = 2 with a budget of 2 layers
        lattice = LatticeSpec(ctx, (pi,))
        got = lattice_exp_value(lattice, (pi * root).mul_theta_power(-1), 100, 2)
        assert got.exp.degree > 2
        assert got.tail >= 100


# ---------------------------------------------------------------------------
# CM points
# ---------------------------------------------------------------------------

class TestCMPoints:
    def test_sqrt_theta(self):
        cm = cm_point("sqrt_theta", CTX, 30)
        assert cm.check_multiplier()
        assert cm.lam(30).abs_exponent() == Fraction(3, 4)

    def test_sqrt_theta_module(self):
        phi = cm_point("sqrt_theta", CTX, 30).drinfeld_module()
        assert phi.rank == 2
        assert phi.g[1] == RamifiedSeries.one(CTX)

    def test_quadratic(self):
        cm = cm_point("quadratic:0,θ+1", CTX, 30)
        assert cm.point.rank == 2
        assert cm.generator is not None

    def test_quadratic_in_k_inf(self):
        with pytest.raises(NotInOmega):
            cm_point("quadratic:0,θ^2", CTX, 30)

    def test_kummer_needs_ramification(self):
        with pytest.raises(FieldUnsupported):
            cm_point("kummer:3", CTX)

    @pytest.mark.parametrize("kind", ["bogus", "quadratic:1"])
    def test_unknown_kind(self, kind):
        with pytest.raises(ValueError):
            cm_point(kind, CTX)
