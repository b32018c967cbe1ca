"""Twisted polynomials sum c_i tau^i over RamifiedSeries, with tau c = c^q tau."""

from __future__ import annotations

from dataclasses import dataclass

from drinfeld.finite_field import FieldContext
from drinfeld.series import INF, RamifiedSeries


def _is_exact_zero(c: RamifiedSeries) -> bool:
    return c.is_zero() and c.is_exact()


@dataclass(frozen=True, eq=False)
class TwistedPoly:
    ctx: FieldContext
    coeffs: tuple[RamifiedSeries, ...]

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while coeffs and _is_exact_zero(coeffs[-1]):
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def scalar(cls, ctx: FieldContext, c: RamifiedSeries | int) -> "TwistedPoly":
        if isinstance(c, int):
            c = RamifiedSeries.constant(ctx, ctx.element(c))
        return cls(ctx, (c,))

    @classmethod
    def tau(cls, ctx: FieldContext, k: int = 1) -> "TwistedPoly":
        zero = RamifiedSeries.zero(ctx)
        return cls(ctx, (zero,) * k + (RamifiedSeries.one(ctx),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, i: int) -> RamifiedSeries:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RamifiedSeries.zero(self.ctx)

    def __add__(self, other: "TwistedPoly") -> "TwistedPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return TwistedPoly(self.ctx, tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    def __neg__(self) -> "TwistedPoly":
        return TwistedPoly(self.ctx, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "TwistedPoly") -> "TwistedPoly":
        return self + (-other)

    def __mul__(self, other: "TwistedPoly") -> "TwistedPoly":
        return ore_mul(self, other)

    def apply(self, x: RamifiedSeries, rel_T: int | None = None) -> RamifiedSeries:
        """(sum c_i tau^i) . x = sum c_i x^(q^i), each term kept to relative
        precision *rel_T* (T-units) when given."""
        acc = RamifiedSeries.zero(self.ctx)
        for i, c in enumerate(self.coeffs):
            if _is_exact_zero(c):
                continue
            acc = acc + _twisted_term(c, x, i, rel_T)
        return acc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwistedPoly):
            return NotImplemented
        return self.ctx == other.ctx and len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def residual_valuation(self, other: "TwistedPoly"):
        diff = self - other
        return min((c.val_bound() for c in diff.coeffs), default=INF)

    def relative_residual(self, other: "TwistedPoly"):
        """min over k of val(self_k - other_k) - val(other_k).

        Where other_k is zero to precision the size of self_k is used; a
        coefficient that is zero to precision on both sides says nothing.
        """
        worst = INF
        for k in range(max(len(self.coeffs), len(other.coeffs))):
            mine, ref = self.coefficient(k), other.coefficient(k)
            bound = (mine - ref).val_bound()
            if bound == INF:
                continue
            scale = ref if not ref.is_zero() else mine
            if scale.is_zero():
                continue
            worst = min(worst, bound - scale.valuation)
        return worst

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.coeffs]


def _twisted_term(a: RamifiedSeries, b: RamifiedSeries, i: int, rel_T: int | None) -> RamifiedSeries:
    """a * b^(q^i), stretching b no further than a (or rel_T) can use."""
    caps = []
    if not b.is_zero():
        if not a.is_exact():
            caps.append((a.prec - a.val_T) + b.val_T * a.ctx.q ** i)
        if rel_T is not None:
            caps.append(b.val_T * a.ctx.q ** i + rel_T)
    term = a * b.frobenius_power(i, min(caps) if caps else None)
    return term if rel_T is None else term.with_relative_T(rel_T)


def ore_mul(f: TwistedPoly, g: TwistedPoly, rel_T: int | None = None) -> TwistedPoly:
    """(sum a_i tau^i)(sum b_j tau^j) = sum a_i b_j^(q^i) tau^(i+j).

    With *rel_T* each product term keeps only rel_T T-digits past its
    leading one; exact products of high tau-degree are otherwise q^i long.
    """
    ctx = f.ctx
    if not f.coeffs or not g.coeffs:
        return TwistedPoly(ctx, ())
    out = [RamifiedSeries.zero(ctx) for _ in range(len(f.coeffs) + len(g.coeffs) - 1)]
    for i, a in enumerate(f.coeffs):
        if _is_exact_zero(a):
            continue
        for j, b in enumerate(g.coeffs):
            if _is_exact_zero(b):
                continue
            out[i + j] = out[i + j] + _twisted_term(a, b, i, rel_T)
    return TwistedPoly(ctx, tuple(out))
