"""Truncated power series in t with RamifiedSeries coefficients.

This is the piece of the Tate algebra we need: Frobenius twisting and the
function Omega(t) = (-theta)^(-q/(q-1)) prod_{i>=1} (1 - t/theta^(q^i)).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from drinfeld.carlitz import carlitz_root, theta
from drinfeld.finite_field import FieldContext
from drinfeld.series import INF, RamifiedSeries, to_T

_logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TSeries:
    ctx: FieldContext
    coeffs: tuple[RamifiedSeries, ...]
    t_order: int

    def __post_init__(self):
        coeffs = tuple(self.coeffs[: self.t_order])
        pad = self.t_order - len(coeffs)
        coeffs += tuple(RamifiedSeries.zero(self.ctx) for _ in range(pad))
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_list(cls, ctx: FieldContext, coeffs, t_order: int | None = None) -> "TSeries":
        coeffs = tuple(coeffs)
        return cls(ctx, coeffs, len(coeffs) if t_order is None else t_order)

    @classmethod
    def t(cls, ctx: FieldContext, t_order: int) -> "TSeries":
        return cls(ctx, (RamifiedSeries.zero(ctx), RamifiedSeries.one(ctx)), t_order)

    def __add__(self, other: "TSeries") -> "TSeries":
        order = min(self.t_order, other.t_order)
        return TSeries(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), order)

    def __neg__(self) -> "TSeries":
        return TSeries(self.ctx, tuple(-a for a in self.coeffs), self.t_order)

    def __sub__(self, other: "TSeries") -> "TSeries":
        return self + (-other)

    def __mul__(self, other) -> "TSeries":
        if isinstance(other, RamifiedSeries):
            return TSeries(self.ctx, tuple(a * other for a in self.coeffs), self.t_order)
        order = min(self.t_order, other.t_order)
        out = []
        for k in range(order):
            acc = RamifiedSeries.zero(self.ctx)
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if a.is_zero() and a.is_exact() or b.is_zero() and b.is_exact():
                    continue
                acc = acc + a * b
            out.append(acc)
        return TSeries(self.ctx, tuple(out), order)

    __rmul__ = __mul__

    def truncate(self, prec) -> "TSeries":
        return TSeries(self.ctx, tuple(c.truncate(prec) for c in self.coeffs), self.t_order)

    def evaluate(self, x: RamifiedSeries) -> RamifiedSeries:
        """sum c_j x^j.  The unknown tail past t_order is bounded by
        extrapolating the last two term valuations; the result is truncated
        there."""
        acc = RamifiedSeries.zero(self.ctx)
        term_vals = []
        power = RamifiedSeries.one(self.ctx)
        for j, c in enumerate(self.coeffs):
            if j:
                power = power * x
            term = c * power
            term_vals.append(term.val_bound())
            acc = acc + term
        if len(term_vals) >= 2 and term_vals[-1] != INF and term_vals[-2] != INF:
            growth = term_vals[-1] - term_vals[-2]
            tail = term_vals[-1] + max(growth, 0)
            acc = acc.truncate(tail)
        return acc

    def residual_valuation(self, other: "TSeries"):
        diff = self - other
        return min((c.val_bound() for c in diff.coeffs), default=INF)


def frobenius_twist(f: TSeries, n: int, prec_T=None) -> TSeries:
    """Raise every coefficient to the q^n-th power; t is left alone."""
    return TSeries(
        f.ctx, tuple(c.frobenius_power(n, prec_T) for c in f.coeffs), f.t_order
    )


def omega_series(ctx: FieldContext, t_order: int, prec) -> TSeries:
    """Omega(t) to t-order *t_order*, coefficients to absolute precision *prec*."""
    q = ctx.q
    root = carlitz_root(ctx)
    prefactor = ((-theta(ctx)) * root).inverse()
    needed = Fraction(prec) - prefactor.valuation
    coeffs = [RamifiedSeries.one(ctx)] + [RamifiedSeries.zero(ctx)] * (t_order - 1)
    i = 1
    while q ** i < needed:
        shift = RamifiedSeries.theta_power(ctx, -(q ** i))
        for j in range(t_order - 1, 0, -1):
            if coeffs[j - 1].is_zero():
                continue
            coeffs[j] = (coeffs[j] - shift * coeffs[j - 1]).truncate(needed)
        i += 1
    _logger.debug("omega: %d factors, t-order %d", i - 1, t_order)
    return TSeries(ctx, tuple((prefactor * c).truncate(prec) for c in coeffs), t_order)
