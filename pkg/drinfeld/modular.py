"""GL_r(A) action on the upper half plane, automorphy checks, the parameter at
infinity u_N, reciprocal polynomials and the identity chains behind the
u-expansion of Eisenstein series.

All identity checks report a *relative* residual: val(lhs - rhs) minus the
valuation of the reference side, in theta-units.  Exact agreement is INF.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random

from drinfeld.carlitz import carlitz_period
from drinfeld.drinfeld_module import DrinfeldModule, phi_of_a
from drinfeld.eisenstein import GUARD, EisensteinSpec, direct_sum, eisenstein_eval
from drinfeld.errors import (
    BudgetExceeded,
    ConfigError,
    ConvergenceError,
    PoleError,
    PrecisionError,
)
from drinfeld.finite_field import FieldContext
from drinfeld.lattice import (
    DEFAULT_ENUM_BUDGET,
    LatticeSpec,
    UpperHalfPoint,
    drinfeld_from_lattice,
    lattice_exp_product,
    lattice_exp_value,
    qpoly_eval,
)
from drinfeld.period_matrix import permutation_sign
from drinfeld.report import CheckResult, judge
from drinfeld.series import INF, RamifiedSeries, to_T
from drinfeld.theta_poly import ThetaPoly, format_poly, polys_below, random_poly

_logger = logging.getLogger(__name__)

DEFAULT_PHI_DEGREE = 4
DEFAULT_LAYER_BUDGET = 5


# ==================== GL_r(A) ====================


@dataclass(frozen=True, eq=False)
class GLrMatrix:
    rows: tuple[tuple[ThetaPoly, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.rows)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise ValueError("GL_r matrices must be square and nonempty")
        object.__setattr__(self, "rows", rows)

    @property
    def ctx(self) -> FieldContext:
        return self.rows[0][0].ctx

    @property
    def rank(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, ctx: FieldContext, r: int) -> "GLrMatrix":
        one, zero = ThetaPoly.constant(ctx, 1), ThetaPoly(ctx, ())
        return cls(tuple(tuple(one if i == j else zero for j in range(r)) for i in range(r)))

    @classmethod
    def elementary(cls, ctx: FieldContext, r: int, i: int, j: int, a: ThetaPoly) -> "GLrMatrix":
        """I + a E_ij for i != j."""
        if i == j:
            raise ValueError("elementary matrices need i != j")
        rows = [list(row) for row in cls.identity(ctx, r).rows]
        rows[i][j] = a
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def from_ints(cls, ctx: FieldContext, rows) -> "GLrMatrix":
        """Rows of F_q constants or ThetaPoly entries."""
        return cls(tuple(
            tuple(x if isinstance(x, ThetaPoly) else ThetaPoly.constant(ctx, ctx.element(x)) for x in row)
            for row in rows
        ))

    def __mul__(self, other: "GLrMatrix") -> "GLrMatrix":
        r = self.rank
        zero = ThetaPoly(self.ctx, ())
        out = []
        for i in range(r):
            row = []
            for j in range(r):
                acc = zero
                for k in range(r):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(tuple(row))
        return GLrMatrix(tuple(out))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GLrMatrix):
            return NotImplemented
        return self.rows == other.rows

    __hash__ = None

    def det(self) -> ThetaPoly:
        total = ThetaPoly(self.ctx, ())
        for perm in itertools.permutations(range(self.rank)):
            term = ThetaPoly.constant(self.ctx, 1)
            for i, j in enumerate(perm):
                term = term * self.rows[i][j]
            total = total + term if permutation_sign(perm) > 0 else total - term
        return total

    def is_invertible(self) -> bool:
        """det in F_q^x."""
        d = self.det()
        return not d.is_zero() and d.is_constant()

    def reduce(self, N: ThetaPoly) -> "GLrMatrix":
        return GLrMatrix(tuple(tuple(x % N for x in row) for row in self.rows))

    def in_gamma(self, N: ThetaPoly) -> bool:
        """Membership in Gamma(N), the kernel of reduction mod N."""
        if not self.is_invertible():
            return False
        identity = GLrMatrix.identity(self.ctx, self.rank)
        for row, id_row in zip(self.rows, identity.rows):
            for x, y in zip(row, id_row):
                if not ((x - y) % N).is_zero():
                    return False
        return True

    def is_identity(self) -> bool:
        return self == GLrMatrix.identity(self.ctx, self.rank)

    def describe(self) -> str:
        return "[" + "; ".join(", ".join(format_poly(x) for x in row) for row in self.rows) + "]"

    def to_json(self) -> list:
        return [[x.to_json() for x in row] for row in self.rows]


def _random_entry(ctx: FieldContext, degree: int, rng: Random) -> ThetaPoly:
    d = rng.randint(-1, degree)
    return ThetaPoly(ctx, ()) if d < 0 else random_poly(ctx, d, rng)


def sample_gamma_N(ctx: FieldContext, N: ThetaPoly, r: int, rng: Random, degree: int = 0,
                   tries: int = 64) -> GLrMatrix:
    """A random element of Gamma(N).

    Tries I + N R with R random of degree <= *degree* and keeps it when the
    determinant is a nonzero constant.  After *tries* rejections it falls
    back to a product of elementary matrices I + N a E_ij, which always lie
    in Gamma(N).
    """
    identity = GLrMatrix.identity(ctx, r)
    for _ in range(tries):
        rows = []
        for i in range(r):
            rows.append(tuple(
                identity.rows[i][j] + N * _random_entry(ctx, degree, rng) for j in range(r)
            ))
        gamma = GLrMatrix(tuple(rows))
        if gamma.is_invertible() and not gamma.is_identity():
            return gamma
    gamma = identity
    for _ in range(2 * r):
        i, j = rng.sample(range(r), 2)
        a = random_poly(ctx, rng.randint(0, degree), rng)
        gamma = gamma * GLrMatrix.elementary(ctx, r, i, j, N * a)
    _logger.debug("Gamma(%s) sample from elementary generators", format_poly(N))
    return gamma


# ==================== Action and automorphy ====================


def relative_residual(value: RamifiedSeries, reference: RamifiedSeries) -> Fraction | float:
    """val(value - reference) - val(reference); the joint precision stands in
    for the valuation when the difference is numerically zero."""
    if reference.is_zero():
        raise PrecisionError("reference side of the identity is zero to precision")
    diff = value - reference
    bound = diff.val_bound()
    if bound == INF:
        return INF
    return bound - reference.valuation


def act(gamma: GLrMatrix, omega: UpperHalfPoint, prec) -> tuple[UpperHalfPoint, RamifiedSeries]:
    """gamma . omega = j^-1 gamma omega and the cocycle j(gamma; omega).

    *prec* is the relative precision of the normalized coordinates.
    """
    if gamma.rank != omega.rank:
        raise ValueError(f"rank {gamma.rank} matrix acting on a rank {omega.rank} point")
    column = [omega.pair(row) for row in gamma.rows]
    j = column[-1]
    if j.is_zero():
        raise PrecisionError("j(gamma; omega) is zero to precision")
    j_inv = j.inverse(-j.valuation + Fraction(prec))
    coords = [x * j_inv for x in column[:-1]]
    return UpperHalfPoint.from_coords(omega.ctx, coords), j


def cocycle_residual(gamma: GLrMatrix, delta: GLrMatrix, omega: UpperHalfPoint, prec) -> Fraction | float:
    """Relative residual of j(gamma delta; omega) = j(gamma; delta.omega) j(delta; omega)."""
    _, j_prod = act(gamma * delta, omega, prec)
    moved, j_delta = act(delta, omega, prec)
    _, j_gamma = act(gamma, moved, prec)
    return relative_residual(j_gamma * j_delta, j_prod)


@dataclass(frozen=True)
class SlashContext:
    """Weight k and type m (taken mod q - 1)."""

    k: int
    m: int = 0

    def apply(self, value: RamifiedSeries, gamma: GLrMatrix, j: RamifiedSeries, prec) -> RamifiedSeries:
        """det(gamma)^m j^-k value."""
        ctx = value.ctx
        det = gamma.det()
        if not det.is_constant() or det.is_zero():
            raise ValueError(f"{gamma.describe()} is not in GL_r(A)")
        c = ctx.pow(det.coeffs[0], self.m % (ctx.q - 1))
        j_inv = j.inverse(-j.valuation + Fraction(prec))
        factor = j_inv ** self.k if self.k >= 0 else j ** (-self.k)
        return (value * factor).scale(c)


def automorphy_check(evaluator, slash: SlashContext, gammas, samples, prec, threshold,
                     check: str = "automorphy", mapper=map) -> list[CheckResult]:
    """Compare (f|_{k,m} gamma)(omega) with f(omega) for every sample and gamma.

    *evaluator* maps an UpperHalfPoint to a value; *mapper* is a map-like
    callable so samples can be spread over a thread pool.  Results come back
    ordered by (sample, gamma).
    """
    gammas = list(gammas)
    prec = Fraction(prec)
    bar = threshold * prec

    def run(item):
        index, omega = item
        reference = evaluator(omega)
        out = []
        for g_index, gamma in enumerate(gammas):
            detail = {"gamma": g_index, "k": slash.k, "m": slash.m}
            if gamma.is_identity():
                out.append(judge(check, index, INF, bar, detail))
                continue
            moved, j = act(gamma, omega, prec + 2 * GUARD)
            lhs = slash.apply(evaluator(moved), gamma, j, prec + GUARD)
            residual = relative_residual(lhs, reference)
            _logger.debug("%s sample %d gamma %d: residual %s", check, index, g_index, residual)
            out.append(judge(check, index, residual, bar, detail))
        return out

    results = []
    for chunk in mapper(run, list(enumerate(samples))):
        results.extend(chunk)
    return results


# ==================== Parameter at infinity ====================


def tail_lattice(omega: UpperHalfPoint, pi_tilde: RamifiedSeries) -> LatticeSpec:
    """pi~ Lambda_{omega~} for omega~ = (w_2, ..., w_r)."""
    return omega.tail().lattice().scaled(pi_tilde)


def _pi(ctx: FieldContext, pi_tilde, prec) -> RamifiedSeries:
    return carlitz_period(ctx, Fraction(prec) + 4 * GUARD) if pi_tilde is None else pi_tilde


def u_parameter(N: ThetaPoly, omega: UpperHalfPoint, rel_prec, degree_budget: int = DEFAULT_LAYER_BUDGET,
                pi_tilde: RamifiedSeries | None = None) -> RamifiedSeries:
    """u_N(omega) = 1 / e_{pi~ Lambda_{omega~}}(pi~ w_1 / N) to relative precision *rel_prec*.

    Raises PoleError when pi~ w_1 / N is a point of the lattice.
    """
    ctx = omega.ctx
    if omega.rank < 2:
        raise ValueError("u_N needs a point of rank at least 2")
    rel = Fraction(rel_prec)
    pi = _pi(ctx, pi_tilde, rel)
    w1 = pi * omega.coords[0]
    z = w1.div(N.to_series(), w1.valuation + N.degree + rel + 2 * GUARD)
    got = lattice_exp_value(tail_lattice(omega, pi), z, rel + GUARD, degree_budget)
    u = got.value.inverse()
    _logger.debug("u_%s: valuation %s, layer degree %d", format_poly(N), u.valuation, got.exp.degree)
    return u.truncate(u.valuation + rel)


def tail_module(omega_tilde: UpperHalfPoint, degree: int = DEFAULT_PHI_DEGREE, prec=None,
                pi_tilde: RamifiedSeries | None = None) -> DrinfeldModule:
    """phi^{pi~ omega~}, the Drinfeld module of the lattice pi~ Lambda_{omega~}.

    For omega~ = (1) the lattice is pi~ A and the module is Carlitz exactly.
    """
    ctx = omega_tilde.ctx
    if omega_tilde.rank == 1:
        return DrinfeldModule.carlitz(ctx)
    prec = Fraction(ctx.default_prec if prec is None else prec)
    pi = _pi(ctx, pi_tilde, prec)
    return drinfeld_from_lattice(omega_tilde.lattice().scaled(pi), degree, prec)


# ==================== Reciprocal polynomials ====================


@dataclass(frozen=True, eq=False)
class ReciprocalPoly:
    """f_a(X) = X^(q^d) c_d^-1 phi_a(1/X) = sum_i (c_i/c_d) X^(q^d - q^i)."""

    a: ThetaPoly
    d: int
    leading: RamifiedSeries  # c_d, the top coefficient of phi_a
    terms: tuple[tuple[int, RamifiedSeries], ...]  # (exponent, coefficient), constant term first

    @property
    def ctx(self) -> FieldContext:
        return self.a.ctx

    def coefficient(self, exponent: int) -> RamifiedSeries:
        for e, c in self.terms:
            if e == exponent:
                return c
        return RamifiedSeries.zero(self.ctx)

    def evaluate(self, x: RamifiedSeries, prec=None) -> RamifiedSeries:
        acc = RamifiedSeries.zero(self.ctx)
        for e, c in self.terms:
            acc = acc + c * (x ** e)
        return acc if prec is None else acc.truncate(prec)

    def to_json(self) -> dict:
        return {
            "a": self.a.to_json(),
            "d": self.d,
            "leading": self.leading.to_json(),
            "terms": [{"exp": e, "coeff": c.to_json()} for e, c in self.terms],
        }


def reciprocal_poly(a: ThetaPoly, omega_tilde: UpperHalfPoint, degree: int = DEFAULT_PHI_DEGREE,
                    prec=None, pi_tilde: RamifiedSeries | None = None,
                    phi: DrinfeldModule | None = None, rel_prec=None) -> ReciprocalPoly:
    """Reciprocal polynomial of phi^{pi~ omega~}_a, with d = (r - 1) deg a.

    *rel_prec* bounds the relative precision of the coefficients of phi_a.
    """
    ctx = a.ctx
    if a.is_zero():
        raise ValueError("the reciprocal polynomial of a = 0 is undefined")
    if phi is None:
        phi = tail_module(omega_tilde, degree, prec, pi_tilde)
    phi_a = phi_of_a(phi, a, rel_prec)
    d = phi.rank * a.degree
    c_d = phi_a.coefficient(d)
    if c_d.is_zero():
        raise PrecisionError(f"leading coefficient of phi_{a} is zero to precision")
    q = ctx.q
    terms = [(0, RamifiedSeries.one(ctx))]
    for i in range(d - 1, -1, -1):
        c = phi_a.coefficient(i)
        if not c.is_zero():
            terms.append((q ** d - q ** i, c.div(c_d)))
    return ReciprocalPoly(a, d, c_d, tuple(terms))


def _qpower(x: RamifiedSeries, k: int, rel) -> RamifiedSeries:
    """x^(q^k) at relative precision *rel* (theta-units)."""
    if x.is_zero():
        return x.frobenius_power(k)
    return x.frobenius_power(k, x.val_T * x.ctx.q ** k + to_T(x.ctx, rel))


def level_change_check(N1: ThetaPoly, N2: ThetaPoly, omega: UpperHalfPoint, prec, threshold,
                       degree_budget: int = DEFAULT_LAYER_BUDGET, pi_tilde: RamifiedSeries | None = None,
                       sample: int = 0, phi_degree: int = DEFAULT_PHI_DEGREE) -> CheckResult:
    """u_{N2} = u_{N1}^(q^d) / (c_d f_n(u_{N1})) for n = N1/N2 and d = (r - 1) deg n."""
    ctx = omega.ctx
    prec = Fraction(prec)
    bar = threshold * prec
    n, rem = N1.divmod(N2)
    if not rem.is_zero():
        raise ConfigError(f"{format_poly(N2)} does not divide {format_poly(N1)}")
    detail = {"N1": format_poly(N1), "N2": format_poly(N2)}
    if N1 == N2:
        return judge("levelchange", sample, INF, bar, dict(detail, d=0))
    pi = _pi(ctx, pi_tilde, prec + 4 * GUARD)
    u1 = u_parameter(N1, omega, prec + 2 * GUARD, degree_budget, pi)
    u2 = u_parameter(N2, omega, prec + GUARD, degree_budget, pi)
    phi = tail_module(omega.tail(), phi_degree, prec + 2 * GUARD, pi)
    rp = reciprocal_poly(n, omega.tail(), phi=phi, rel_prec=prec + 2 * GUARD)
    numerator = _qpower(u1, rp.d, prec + 2 * GUARD)
    denominator = rp.leading * rp.evaluate(u1)
    rhs = numerator.div(denominator)
    residual = relative_residual(rhs, u2)
    detail.update(d=rp.d, u_valuation=u1.valuation)
    _logger.debug("level change %s -> %s: residual %s", detail["N1"], detail["N2"], residual)
    return judge("levelchange", sample, residual, bar, detail)


# ==================== Eisenstein u-expansion chain ====================


def _leading_valuation(phi: DrinfeldModule, b: ThetaPoly, u_val: Fraction, c0) -> Fraction:
    """Valuation of u^(q^d)/c_d for b != 0, of 1/c0 for b = 0."""
    if b.is_zero():
        return -c0.valuation
    phi_b = phi_of_a(phi, b, GUARD)
    d = phi.rank * b.degree
    return phi.ctx.q ** d * u_val - phi_b.coefficient(d).valuation


def eisenstein_expansion_check(spec: EisensteinSpec, omega: UpperHalfPoint, prec, threshold,
                               degree_budget: int = DEFAULT_LAYER_BUDGET,
                               pi_tilde: RamifiedSeries | None = None, sample: int = 0,
                               phi_degree: int = DEFAULT_PHI_DEGREE,
                               budget: int = DEFAULT_ENUM_BUDGET) -> CheckResult:
    """pi~^-1 E_{u,N}(omega) against its partial-fraction chain in u = u_N(omega).

    Splitting a = (a_1, a~) and summing over a~ first gives

        pi~^-1 E = sum_{a_1} 1 / e(pi~ (a_1 + v_1/N) w_1 + pi~ u~.omega~)

    with e the exponential of pi~ Lambda_{omega~}.  For b = a_1 N + v_1 != 0
    each term is (u^(q^d)/c_d) sum_i (-X)^i with X = f_b(u) - 1 + c0 u^(q^d)/c_d
    and c0 = e(pi~ u~.omega~).  a_1 runs over degree <= B and the inner sum
    over i < I; both cutoffs are chosen from valuations so the omitted part
    lies beyond the target.
    """
    ctx = spec.ctx
    q = ctx.q
    prec = Fraction(prec)
    bar = threshold * prec
    if omega.rank < 2 or spec.rank != omega.rank:
        raise ConfigError("the expansion check needs matching u and point of rank at least 2")
    N, v1, v_tail = spec.N, spec.v[0], spec.v[1:]
    omega_t = omega.tail()
    pi = _pi(ctx, pi_tilde, prec + 6 * GUARD)
    phi = tail_module(omega_t, phi_degree, prec + 3 * GUARD, pi)
    R = phi.rank
    rel = prec + 3 * GUARD
    u = u_parameter(N, omega, rel, degree_budget, pi)
    u_val = u.valuation

    c0 = None
    if not all((x % N).is_zero() for x in v_tail):
        z0 = pi * omega_t.pair(v_tail).div(N.to_series(), prec + 4 * GUARD)
        c0 = lattice_exp_value(tail_lattice(omega, pi), z0, rel, degree_budget).value

    g_val = phi.coefficient(R).valuation
    growth = u_val - g_val / (q ** R - 1)
    if growth <= 0:
        raise ConvergenceError(f"|u| = q^{-u_val} is too large for the expansion to converge")

    first = [a1 * N + v1 for a1 in polys_below(ctx, 1)]
    leads = [_leading_valuation(phi, b, u_val, c0) for b in first if not (b.is_zero() and c0 is None)]
    v_est = min(leads)
    needed = v_est + prec + GUARD

    def bound(n):
        return q ** (R * n) * u_val - g_val * Fraction(q ** (R * n) - 1, q ** R - 1)

    B = 0
    while bound(B + 1 + N.degree) < needed:
        B += 1
        if q ** (B + 1) > budget:
            raise BudgetExceeded(f"expansion needs a_1 of degree {B}, beyond the budget {budget}")

    chain = RamifiedSeries.zero(ctx, to_T(ctx, needed))
    I_max = 0
    term_vals = []
    for a1 in polys_below(ctx, B + 1):
        b = a1 * N + v1
        if b.is_zero():
            if c0 is None:
                raise PoleError("u . omega is a lattice point")
            term = c0.inverse(needed)
            term_vals.append(term.valuation)
            chain = chain + term
            continue
        phi_b = phi_of_a(phi, b, rel)
        d = R * b.degree
        c_d = phi_b.coefficient(d)
        uq = _qpower(u, d, rel)
        lead = uq.div(c_d)
        lv = lead.valuation
        term_vals.append(lv)
        if lv >= needed:
            continue
        x_prec = needed - lv + GUARD
        X = RamifiedSeries.zero(ctx, to_T(ctx, x_prec))
        for i in range(d):
            c = phi_b.coefficient(i)
            if c.is_zero():
                continue
            X = X + c.div(c_d) * uq.div(_qpower(u, i, rel))
        if c0 is not None:
            X = X + c0 * lead
        X = X.truncate(x_prec)
        if X.is_zero():
            inner = 1
        else:
            if X.valuation <= 0:
                raise ConvergenceError(f"expansion term for b = {format_poly(b)} does not converge")
            inner = max(1, math.ceil((needed - lv) / X.valuation))
        I_max = max(I_max, inner)
        geom = RamifiedSeries.one(ctx)
        power = RamifiedSeries.one(ctx)
        for _ in range(1, inner):
            power = (power * -X).truncate(x_prec)
            geom = geom + power
        chain = chain + (lead * geom).truncate(needed)
    chain = chain.truncate(needed)

    direct = eisenstein_eval(spec, omega, pi.valuation + needed + GUARD, degree_budget, pi_tilde=pi)
    scaled = arithmetic_normalize("eisenstein", direct.value, pi)
    residual = relative_residual(chain, scaled)
    detail = {
        "B": B,
        "I_max": I_max,
        "u_valuation": u_val,
        "dominant_valuation": v_est,
        "value_valuation": scaled.valuation,
        "term_valuations": term_vals[: q + 1],
        "layer_degree": direct.degree,
    }
    _logger.debug("expansion chain for %s: B=%d, I=%d, residual %s", spec.describe(), B, I_max, residual)
    return judge("expansion", sample, residual, bar, detail)


def logder_check(lattice: LatticeSpec, z: RamifiedSeries, degree: int, prec, threshold,
                 sample: int = 0, budget: int = DEFAULT_ENUM_BUDGET) -> CheckResult:
    """sum_{l in V} 1/(z - l) = 1/e_V(z) for V = (A_{<degree})^r . basis."""
    prec = Fraction(prec)
    lexp = lattice_exp_product(lattice, degree, prec + GUARD)
    e_v = qpoly_eval(lexp.coeffs, z)
    if e_v.is_zero():
        raise PoleError("z lies in the truncated lattice")
    target = -e_v.valuation + prec
    rhs = e_v.inverse(target)
    lhs = direct_sum(lattice, z, degree, target, budget)
    residual = relative_residual(lhs, rhs)
    return judge("logder", sample, residual, threshold * prec, {"degree": degree})


# ==================== Arithmetic normalization ====================


def arithmetic_normalize(kind: str, value: RamifiedSeries, pi_tilde: RamifiedSeries, i: int = 0) -> RamifiedSeries:
    """g^ari_i = pi~^(1 - q^i) g_i and E^ari = pi~^-1 E."""
    if kind == "g_form":
        exponent = 1 - value.ctx.q ** i
        return value if exponent == 0 else value * pi_tilde ** exponent
    if kind == "eisenstein":
        return value.div(pi_tilde)
    raise ValueError(f"unknown normalization {kind!r}")


def coefficient_forms(omega: UpperHalfPoint, degree: int = DEFAULT_PHI_DEGREE, prec=None,
                      pi_tilde: RamifiedSeries | None = None) -> tuple[RamifiedSeries, ...]:
    """(g^ari_1, ..., g^ari_r)(omega), read off the module of pi~ Lambda_omega."""
    ctx = omega.ctx
    prec = Fraction(ctx.default_prec if prec is None else prec)
    pi = _pi(ctx, pi_tilde, prec)
    return drinfeld_from_lattice(omega.lattice().scaled(pi), degree, prec).g
