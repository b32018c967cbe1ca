"""Weight-one Eisenstein series E_{u,N}(omega) = sum_{a in A^r} 1/((a + u).omega).

Summing 1/(z - l) over a finite F_q-space V gives 1/e_V(z), because
e_V'(z) = 1.  So the partial sum over (A_{<D})^r is exactly 1/e_{V_D}(u.omega)
and the whole series is 1/e_Lambda(u.omega).  The default evaluation goes
through lattice_exp_value on the pi~-scaled lattice,

    E_{u,N}(omega) = pi~ / e_{pi~ Lambda}(pi~ u.omega),

and the direct enumeration is kept for cross-checks on small degrees.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from drinfeld.carlitz import carlitz_period
from drinfeld.errors import BudgetExceeded, ConfigError, PoleError
from drinfeld.finite_field import FieldContext
from drinfeld.lattice import (
    DEFAULT_ENUM_BUDGET,
    LatticeSpec,
    UpperHalfPoint,
    lattice_exp_product,
    lattice_exp_value,
    qpoly_eval,
)
from drinfeld.series import RamifiedSeries
from drinfeld.theta_poly import ThetaPoly, format_poly, parse_poly

_logger = logging.getLogger(__name__)

DEFAULT_DEGREE_BUDGET = 5
GUARD = 8


@dataclass(frozen=True, eq=False)
class EisensteinSpec:
    """Level N (monic) and u = (v_1, ..., v_r) / N."""

    N: ThetaPoly
    v: tuple[ThetaPoly, ...]

    def __post_init__(self):
        if self.N.is_zero() or not self.N.is_monic():
            raise ConfigError(f"level N must be monic, got {self.N}")
        v = tuple(self.v)
        if all((x % self.N).is_zero() for x in v):
            raise ConfigError("u must be nonzero modulo A^r")
        object.__setattr__(self, "v", v)

    @property
    def ctx(self) -> FieldContext:
        return self.N.ctx

    @property
    def rank(self) -> int:
        return len(self.v)

    def u_dot(self, omega: UpperHalfPoint, prec=None) -> RamifiedSeries:
        """u . omega = (sum v_i w_i) / N."""
        numerator = omega.pair(self.v)
        return numerator.div(self.N.to_series(), prec)

    def shifted(self, index: int, a: ThetaPoly) -> "EisensteinSpec":
        """u + a e_index (same value of the series)."""
        v = list(self.v)
        v[index] = v[index] + a * self.N
        return EisensteinSpec(self.N, tuple(v))

    def describe(self) -> str:
        return ",".join(f"({format_poly(x)})/({format_poly(self.N)})" for x in self.v)

    def to_json(self) -> dict:
        return {"N": self.N.to_json(), "v": [x.to_json() for x in self.v]}

    @classmethod
    def from_text(cls, ctx: FieldContext, u_text: str, n_text: str) -> "EisensteinSpec":
        """Parse u as comma-separated fractions like "1/θ,0" with denominators dividing N."""
        N = parse_poly(ctx, n_text)
        if N.is_zero() or not N.is_monic():
            raise ConfigError(f"level N must be monic, got {n_text!r}")
        v = []
        for part in u_text.split(","):
            num_text, _, den_text = part.partition("/")
            num = parse_poly(ctx, num_text)
            den = parse_poly(ctx, den_text) if den_text else ThetaPoly.constant(ctx, 1)
            if den.is_zero() or not den.divides(N):
                raise ConfigError(f"denominator of {part!r} does not divide N = {n_text}")
            v.append(num * (N // den))
        return cls(N, tuple(v))


@dataclass(frozen=True, eq=False)
class EisensteinValue:
    value: RamifiedSeries
    method: str
    degree: int
    tail_relative: Fraction
    next_layer_val: Fraction

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "method": self.method,
            "degree": self.degree,
            "tail_relative": str(self.tail_relative),
            "next_layer_val": str(self.next_layer_val),
        }


def lattice_eisenstein(lattice: LatticeSpec, z: RamifiedSeries, prec, degree_budget: int,
                       pi_tilde: RamifiedSeries | None = None) -> EisensteinValue:
    """sum_{l in Lambda} 1/(z - l) = 1/e_Lambda(z) to absolute precision *prec*.

    With *pi_tilde* given the lattice is scaled by it first.
    """
    prec = Fraction(prec)
    scale = RamifiedSeries.one(lattice.ctx) if pi_tilde is None else pi_tilde
    if pi_tilde is not None:
        lattice = lattice.scaled(pi_tilde)
        z = pi_tilde * z
    rel = prec + GUARD
    while True:
        got = lattice_exp_value(lattice, z, rel, degree_budget)
        val_e = scale.valuation - got.value.valuation
        needed = prec - val_e
        if needed <= rel:
            break
        rel = needed
    value = scale.div(got.value).truncate(prec)
    return EisensteinValue(value, "layers", got.exp.degree, got.tail, got.exp.next_layer_val)


def _span_points(ctx: FieldContext, gens):
    """Every F_q-combination of *gens* (q^len points), depth-first."""
    fq = ctx.fq_elements()

    def walk(i, acc):
        if i == len(gens):
            yield acc
            return
        for c in fq:
            yield from walk(i + 1, acc if c == 0 else acc + gens[i].scale(c))

    yield from walk(0, RamifiedSeries.zero(ctx))


def direct_sum(lattice: LatticeSpec, z: RamifiedSeries, degree: int, prec,
               budget: int = DEFAULT_ENUM_BUDGET) -> RamifiedSeries:
    """sum over a in (A_{<degree})^r of 1/(z + a.basis), term by term."""
    ctx = lattice.ctx
    count = ctx.q ** (lattice.rank * degree)
    if count > budget:
        raise BudgetExceeded(f"direct Eisenstein sum over {count} points exceeds budget {budget}")
    gens = [w.mul_theta_power(j) for j in range(degree) for w in lattice.basis]
    total = RamifiedSeries.zero(ctx)
    for point in _span_points(ctx, gens):
        x = z + point
        if x.is_zero():
            raise PoleError("u . omega is a lattice point")
        total = total + x.inverse(prec)
    return total.truncate(prec)


def eisenstein_eval(spec: EisensteinSpec, omega: UpperHalfPoint, target_prec,
                    degree_budget: int = DEFAULT_DEGREE_BUDGET, method: str = "layers",
                    degree: int | None = None, pi_tilde: RamifiedSeries | None = None,
                    budget: int = DEFAULT_ENUM_BUDGET) -> EisensteinValue:
    """E_{u,N}(omega) to absolute precision *target_prec*.

    "layers" picks the degree from the tail bound and works on the
    pi~-scaled lattice (pi~ is computed when not passed in); "direct"
    enumerates (A_{<degree})^r and reports the layer tail bound of that
    degree alongside.
    """
    ctx = spec.ctx
    if spec.rank != omega.rank:
        raise ConfigError(f"u has {spec.rank} entries but the point has rank {omega.rank}")
    target = Fraction(target_prec)
    z = spec.u_dot(omega, target + 2 * GUARD - min(0, omega.abs_exponent()))
    lattice = omega.lattice().reduced()
    if method == "layers":
        if pi_tilde is None and ctx.has_carlitz_root():
            pi_tilde = carlitz_period(ctx, target + 4 * GUARD)
        result = lattice_eisenstein(lattice, z, target, degree_budget, pi_tilde)
        _logger.debug("E_{%s}: degree %d, tail %s", spec.describe(), result.degree, result.tail_relative)
        return result
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    degree = degree or 1
    value = direct_sum(lattice, z, degree, target, budget)
    lexp = lattice_exp_product(lattice, degree, target + GUARD)
    y = qpoly_eval(lexp.coeffs, z)
    tail = lexp.tail_exponent(y.valuation)
    return EisensteinValue(value, "direct", degree, tail, lexp.next_layer_val)


def eisenstein_rel(spec: EisensteinSpec, omega: UpperHalfPoint, rel_prec,
                   degree_budget: int = DEFAULT_DEGREE_BUDGET,
                   pi_tilde: RamifiedSeries | None = None) -> EisensteinValue:
    """E_{u,N}(omega) to relative precision *rel_prec*.

    Used where both sides of an identity are compared by relative residual
    and the size of the value is not known beforehand.
    """
    ctx = spec.ctx
    if spec.rank != omega.rank:
        raise ConfigError(f"u has {spec.rank} entries but the point has rank {omega.rank}")
    rel = Fraction(rel_prec)
    if pi_tilde is None:
        pi_tilde = carlitz_period(ctx, rel + 4 * GUARD)
    numerator = omega.pair(spec.v)
    if numerator.is_zero():
        raise PoleError("u . omega vanishes")
    z = numerator.div(spec.N.to_series(), numerator.valuation + spec.N.degree + rel + 2 * GUARD)
    got = lattice_exp_value(omega.lattice().scaled(pi_tilde), pi_tilde * z, rel + GUARD, degree_budget)
    value = pi_tilde.div(got.value)
    value = value.truncate(value.valuation + rel)
    return EisensteinValue(value, "layers", got.exp.degree, got.tail, got.exp.next_layer_val)
