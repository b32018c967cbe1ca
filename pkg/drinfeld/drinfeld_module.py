"""Drinfeld modules phi_t = theta + g_1 tau + ... + g_r tau^r and their
F_q-linear series: exponential, logarithm and quasi-periodic functions.

Coefficients of these series shrink doubly exponentially, so they are kept
at a fixed *relative* precision (rel_prec, theta-units) instead of an
absolute one; evaluation turns that back into an absolute precision.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from drinfeld.carlitz import theta
from drinfeld.errors import TailBoundError
from drinfeld.finite_field import FieldContext
from drinfeld.series import INF, RamifiedSeries, to_T
from drinfeld.theta_poly import ThetaPoly
from drinfeld.twisted_poly import TwistedPoly, ore_mul

_logger = logging.getLogger(__name__)

DEFAULT_KMAX = 24
REL_GUARD = 16
REFINE_ROUNDS = 4


@dataclass(frozen=True, eq=False)
class DrinfeldModule:
    ctx: FieldContext
    g: tuple[RamifiedSeries, ...]

    def __post_init__(self):
        g = tuple(self.g)
        if not g or g[-1].is_zero():
            raise ValueError("the top coefficient g_r must be nonzero at the working precision")
        object.__setattr__(self, "g", g)

    @classmethod
    def carlitz(cls, ctx: FieldContext) -> "DrinfeldModule":
        return cls(ctx, (RamifiedSeries.one(ctx),))

    @classmethod
    def from_polys(cls, ctx: FieldContext, polys) -> "DrinfeldModule":
        """Module with polynomial coefficients g_i = polys[i-1](theta)."""
        return cls(ctx, tuple(p.to_series() for p in polys))

    @property
    def rank(self) -> int:
        return len(self.g)

    def coefficient(self, j: int) -> RamifiedSeries:
        """g_j with g_0 = theta; zero past the rank."""
        if j == 0:
            return theta(self.ctx)
        if j <= self.rank:
            return self.g[j - 1]
        return RamifiedSeries.zero(self.ctx)

    @property
    def phi_t(self) -> TwistedPoly:
        return TwistedPoly(self.ctx, (theta(self.ctx),) + self.g)

    def to_json(self) -> dict:
        return {"r": self.rank, "g": [c.to_json() for c in self.g]}


@dataclass(frozen=True, eq=False)
class EntireSeries:
    """sum_k coeffs[k] X^(q^k).  *complete* marks a finite q-polynomial (no tail)."""

    ctx: FieldContext
    coeffs: tuple[RamifiedSeries, ...]
    label: str = ""
    complete: bool = False

    @property
    def k_max(self) -> int:
        return len(self.coeffs) - 1

    def valuations(self) -> list:
        return [c.valuation for c in self.coeffs]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "k_max": self.k_max,
            "coeffs": [c.to_json() for c in self.coeffs],
        }


def phi_of_a(phi: DrinfeldModule, a: ThetaPoly, rel_prec=None) -> TwistedPoly:
    """phi_a by Horner's rule in phi_t.

    Exact by default; with *rel_prec* (theta-units) every coefficient is
    known to that relative precision, which keeps high-degree a affordable.
    """
    ctx = phi.ctx
    rel_T = None if rel_prec is None else to_T(ctx, rel_prec)
    result = TwistedPoly(ctx, ())
    step = phi.phi_t
    for c in reversed(a.coeffs):
        result = ore_mul(result, step, rel_T) + TwistedPoly.scalar(ctx, RamifiedSeries.constant(ctx, c))
    return result


def _rel_T(ctx: FieldContext, rel_prec) -> int:
    return to_T(ctx, ctx.default_prec + REL_GUARD if rel_prec is None else rel_prec)


def _frob_rel(x: RamifiedSeries, k: int, rel_T: int) -> RamifiedSeries:
    """x^(q^k) kept to relative precision rel_T."""
    if x.is_zero():
        return x.frobenius_power(k)
    return x.frobenius_power(k, x.val_T * x.ctx.q ** k + rel_T)


def _theta_gap(ctx: FieldContext, k: int, rel_T: int) -> RamifiedSeries:
    """theta^(q^k) - theta at relative precision rel_T."""
    lead = RamifiedSeries.theta_power(ctx, ctx.q ** k, prec_T=-ctx.m * ctx.q ** k + rel_T)
    return lead - theta(ctx)


def _shortfall(c: RamifiedSeries, rel_T: int) -> int:
    """T-digits of relative precision c is missing; all of rel_T when c is zero to precision."""
    if c.is_exact():
        return 0
    if c.is_zero():
        return rel_T
    return rel_T - (c.prec - c.val_T)


def _refined(compute, rel_T: int, label: str) -> list[RamifiedSeries]:
    """Run compute(work_T) until every coefficient holds rel_T relative digits.

    Leading terms of a recursion sum can cancel, leaving a coefficient with
    less relative precision than its summands (or none at all); the working
    precision grows by the shortfall until that stops or stops helping.
    """
    work_T, previous = rel_T, None
    for _ in range(REFINE_ROUNDS):
        coeffs = compute(work_T)
        short = max((_shortfall(c, rel_T) for c in coeffs), default=0)
        if short <= 0:
            return coeffs
        if previous is not None and previous <= short < rel_T:
            # the inputs themselves limit the precision
            return coeffs
        previous = short
        _logger.debug("%s coefficients short by %d T-digits at working precision %d", label, short, work_T)
        work_T += max(short, rel_T)
    _logger.warning("%s coefficients still short of relative precision %d after %d rounds",
                    label, rel_T, REFINE_ROUNDS)
    return coeffs


def exp_coeffs(phi: DrinfeldModule, k_max: int = DEFAULT_KMAX, rel_prec=None) -> EntireSeries:
    """alpha_0 = 1, alpha_k (theta^(q^k) - theta) = sum_{j=1}^{min(k,r)} g_j alpha_{k-j}^(q^j)."""
    ctx = phi.ctx

    def compute(rel_T):
        alpha = [RamifiedSeries.one(ctx)]
        for k in range(1, k_max + 1):
            acc = RamifiedSeries.zero(ctx)
            for j in range(1, min(k, phi.rank) + 1):
                acc = acc + phi.g[j - 1] * _frob_rel(alpha[k - j], j, rel_T)
            gap = _theta_gap(ctx, k, rel_T)
            alpha.append((acc * gap.inverse()).with_relative_T(rel_T))
        return alpha

    rel_T = _rel_T(ctx, rel_prec)
    alpha = _refined(compute, rel_T, "exp")
    _logger.debug("exp coefficients through k=%d, relative precision %s", k_max, rel_T)
    return EntireSeries(ctx, tuple(alpha), label="exp")


def log_coeffs(phi: DrinfeldModule, k_max: int = DEFAULT_KMAX, rel_prec=None) -> EntireSeries:
    """ell_0 = 1, ell_n (theta - theta^(q^n)) = sum_{j=1}^{min(n,r)} ell_{n-j} g_j^(q^(n-j)).

    This is log(phi_t(X)) = theta log(X) read off coefficientwise, so it does
    not go through the exponential.
    """
    ctx = phi.ctx

    def compute(rel_T):
        ell = [RamifiedSeries.one(ctx)]
        for n in range(1, k_max + 1):
            acc = RamifiedSeries.zero(ctx)
            for j in range(1, min(n, phi.rank) + 1):
                acc = acc + ell[n - j] * _frob_rel(phi.g[j - 1], n - j, rel_T)
            gap = -_theta_gap(ctx, n, rel_T)
            ell.append((acc * gap.inverse()).with_relative_T(rel_T))
        return ell

    return EntireSeries(ctx, tuple(_refined(compute, _rel_T(ctx, rel_prec), "log")), label="log")


def quasi_period_coeffs(phi: DrinfeldModule, i: int, k_max: int = DEFAULT_KMAX,
                        exp: EntireSeries | None = None, rel_prec=None) -> EntireSeries:
    """Coefficients of F_{tau^i}: c_k (theta^(q^k) - theta) = alpha_{k-i}^(q^i).

    i = 0 is the biderivation t -> phi_t - theta, whose quasi-periodic
    function is exp(X) - X.
    """
    ctx = phi.ctx
    if not 0 <= i <= phi.rank - 1:
        raise ValueError(f"biderivation index {i} outside 0..{phi.rank - 1}")
    if exp is None or exp.k_max < k_max:
        exp = exp_coeffs(phi, k_max, rel_prec)
    if i == 0:
        return EntireSeries(ctx, (RamifiedSeries.zero(ctx),) + exp.coeffs[1 : k_max + 1], label="F_tau^0")
    rel_T = _rel_T(ctx, rel_prec)
    out = [RamifiedSeries.zero(ctx)]
    for k in range(1, k_max + 1):
        if k < i:
            out.append(RamifiedSeries.zero(ctx))
            continue
        top = _frob_rel(exp.coeffs[k - i], i, rel_T)
        out.append((top * _theta_gap(ctx, k, rel_T).inverse()).with_relative_T(rel_T))
    return EntireSeries(ctx, tuple(out), label=f"F_tau^{i}")


# ==================== Evaluation ====================


def term_valuations(f: EntireSeries, x: RamifiedSeries) -> list:
    """val(c_k x^(q^k)) in T-units, using precision bounds for zero entries."""
    q = f.ctx.q
    vx = x.val_T
    return [c.val_T + q ** k * vx for k, c in enumerate(f.coeffs)]


def entire_eval(f: EntireSeries, x: RamifiedSeries, prec=None) -> RamifiedSeries:
    """sum_k c_k x^(q^k) to absolute precision *prec* (theta-units).

    Terms whose valuation already lies beyond the target are skipped.  The
    part past k_max is bounded by extrapolating the last two term
    valuations; if that bound does not reach the target the evaluation is
    refused with TailBoundError.  Numerically zero coefficients and
    imprecise x lower the reported precision instead.
    """
    ctx = f.ctx
    target_T = to_T(ctx, ctx.default_prec if prec is None else prec)
    if x.is_zero() and x.is_exact():
        return RamifiedSeries.zero(ctx)
    vals = term_valuations(f, x)
    if not f.complete and len(vals) >= 2 and vals[-1] != INF:
        last, before = vals[-1], vals[-2]
        if last <= before or 2 * last - before < target_T:
            raise TailBoundError(
                f"{f.label or 'series'} tail at k={f.k_max} only reaches "
                f"{Fraction(last, ctx.m)}, target {Fraction(target_T, ctx.m)}"
            )
    acc = RamifiedSeries.zero(ctx, target_T)
    used = 0
    for k, c in enumerate(f.coeffs):
        if vals[k] >= target_T or (c.is_zero() and c.is_exact()):
            continue
        xk = x.frobenius_power(k, target_T - c.val_T)
        acc = acc + c * xk
        used += 1
    _logger.debug("%s evaluated with %d of %d terms", f.label or "series", used, len(vals))
    return acc


# ==================== Functional-equation residuals ====================


def _relative(res: RamifiedSeries, scale_T) -> Fraction | float:
    bound = res.val_bound()
    if bound == INF:
        return INF
    return bound - Fraction(scale_T, res.ctx.m)


def _scale(side: RamifiedSeries, terms) -> int:
    """val_T of the largest nonzero term of an identity, *side* included.

    Cancelling summands keep only their own relative precision, so a
    residual is measured against the biggest of them.
    """
    return min((t.val_T for t in [side, *terms] if not t.is_zero()), default=side.val_T)


def exp_residuals(phi: DrinfeldModule, exp: EntireSeries, rel_prec=None) -> list:
    """Relative valuation of the X^(q^k) coefficient of phi_t(exp X) - exp(theta X), k >= 1."""
    ctx = phi.ctx
    rel_T = _rel_T(ctx, rel_prec)
    out = []
    for k in range(1, exp.k_max + 1):
        terms = [phi.coefficient(j) * _frob_rel(exp.coeffs[k - j], j, rel_T)
                 for j in range(0, min(k, phi.rank) + 1)]
        lhs = sum(terms, RamifiedSeries.zero(ctx))
        rhs = exp.coeffs[k] * RamifiedSeries.theta_power(ctx, ctx.q ** k)
        out.append(_relative(lhs - rhs, _scale(rhs, terms)))
    return out


def quasi_residuals(phi: DrinfeldModule, i: int, quasi: EntireSeries, exp: EntireSeries,
                    rel_prec=None) -> list:
    """Relative valuation of the X^(q^k) coefficient of F(theta X) - theta F(X) - exp(X)^(q^i)."""
    ctx = phi.ctx
    rel_T = _rel_T(ctx, rel_prec)
    th = theta(ctx)
    out = []
    for k in range(1, quasi.k_max + 1):
        c = quasi.coeffs[k]
        terms = []
        lhs = c * RamifiedSeries.theta_power(ctx, ctx.q ** k) - c * th
        if i == 0:
            # delta_t = phi_t - theta, so the right side is sum_{j>=1} g_j exp(X)^(q^j)
            terms = [phi.g[j - 1] * _frob_rel(exp.coeffs[k - j], j, rel_T)
                     for j in range(1, min(k, phi.rank) + 1)]
            rhs = sum(terms, RamifiedSeries.zero(ctx))
        elif k >= i:
            rhs = _frob_rel(exp.coeffs[k - i], i, rel_T)
        else:
            rhs = RamifiedSeries.zero(ctx)
        out.append(_relative(lhs - rhs, _scale(rhs, terms + [lhs])))
    return out


def log_exp_residuals(exp: EntireSeries, log: EntireSeries, rel_prec=None) -> list:
    """Relative valuation of the X^(q^n) coefficient of log(exp X) - X, n >= 1."""
    ctx = exp.ctx
    rel_T = _rel_T(ctx, rel_prec)
    n_max = min(exp.k_max, log.k_max)
    out = []
    for n in range(1, n_max + 1):
        acc = RamifiedSeries.zero(ctx)
        scale = None
        for i in range(n + 1):
            term = log.coeffs[i] * _frob_rel(exp.coeffs[n - i], i, rel_T)
            if not term.is_zero():
                scale = term.val_T if scale is None else min(scale, term.val_T)
            acc = acc + term
        out.append(_relative(acc, scale if scale is not None else acc.val_T))
    return out


def min_residual(values) -> Fraction | float:
    return min(values, default=INF)
