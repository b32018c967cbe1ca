"""Polynomials in theta over F_q (coefficients as F_{q^s} ints).

The same class stands in for a in F_q[t]: a(theta) is the identical
coefficient list, only the variable name differs.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from random import Random

from drinfeld.finite_field import FieldContext
from drinfeld.series import INF, RamifiedSeries


def _trim(coeffs) -> tuple[int, ...]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True, eq=False)
class ThetaPoly:
    ctx: FieldContext
    coeffs: tuple[int, ...]  # low degree first

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def constant(cls, ctx: FieldContext, c: int) -> "ThetaPoly":
        return cls(ctx, (c,))

    @classmethod
    def theta(cls, ctx: FieldContext) -> "ThetaPoly":
        return cls(ctx, (0, 1))

    @classmethod
    def monomial(cls, ctx: FieldContext, k: int, c: int = 1) -> "ThetaPoly":
        return cls(ctx, (0,) * k + (c,))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return self.leading() == 1

    def is_constant(self) -> bool:
        return self.degree <= 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThetaPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ctx, self.coeffs))

    def _coerce(self, other) -> "ThetaPoly":
        if isinstance(other, ThetaPoly):
            return other
        if isinstance(other, int):
            return ThetaPoly.constant(self.ctx, self.ctx.element(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        out = [
            ctx.add(a, b)
            for a, b in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=0)
        ]
        return ThetaPoly(ctx, out)

    __radd__ = __add__

    def __neg__(self) -> "ThetaPoly":
        return ThetaPoly(self.ctx, [self.ctx.neg(a) for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        if self.is_zero() or other.is_zero():
            return ThetaPoly(ctx, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
        return ThetaPoly(ctx, out)

    __rmul__ = __mul__

    def scale(self, c: int) -> "ThetaPoly":
        return ThetaPoly(self.ctx, [self.ctx.mul(a, c) for a in self.coeffs])

    def __pow__(self, k: int) -> "ThetaPoly":
        result = ThetaPoly.constant(self.ctx, 1)
        for _ in range(k):
            result = result * self
        return result

    def divmod(self, other: "ThetaPoly") -> tuple["ThetaPoly", "ThetaPoly"]:
        ctx = self.ctx
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        quo = [0] * max(0, len(rem) - len(other.coeffs) + 1)
        lead_inv = ctx.inv(other.leading())
        dg = other.degree
        for k in range(len(rem) - 1, dg - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            f = ctx.mul(c, lead_inv)
            quo[k - dg] = f
            for j, b in enumerate(other.coeffs):
                rem[k - dg + j] = ctx.sub(rem[k - dg + j], ctx.mul(f, b))
        return ThetaPoly(ctx, quo), ThetaPoly(ctx, rem)

    def __floordiv__(self, other: "ThetaPoly") -> "ThetaPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "ThetaPoly") -> "ThetaPoly":
        return self.divmod(other)[1]

    def divides(self, other: "ThetaPoly") -> bool:
        return (other % self).is_zero()

    def to_series(self, prec_T=INF) -> RamifiedSeries:
        """a(theta) as an exact (or truncated) series."""
        ctx = self.ctx
        if self.is_zero():
            return RamifiedSeries.zero(ctx, prec_T)
        m, d = ctx.m, self.degree
        rows = [0] * (m * d + 1)
        for i, c in enumerate(self.coeffs):
            rows[m * (d - i)] = c
        return RamifiedSeries.from_ints(ctx, -m * d, rows, prec_T)

    def evaluate(self, x: RamifiedSeries) -> RamifiedSeries:
        """Horner evaluation at a series argument."""
        acc = RamifiedSeries.zero(x.ctx)
        for c in reversed(self.coeffs):
            acc = acc * x + RamifiedSeries.constant(x.ctx, c)
        return acc

    def to_json(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self) -> str:
        return f"ThetaPoly({format_poly(self)})"

    def __str__(self) -> str:
        return format_poly(self)


def format_poly(a: ThetaPoly, var: str = "θ") -> str:
    if a.is_zero():
        return "0"
    parts = []
    for i in range(a.degree, -1, -1):
        c = a.coeffs[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{c}{mono}")
    return " + ".join(parts)


_TERM = re.compile(r"^([0-9]*)\*?(?:(θ|theta|t|T)(?:\^|\*\*)?([0-9]+)?)?$")


def parse_poly(ctx: FieldContext, text: str) -> ThetaPoly:
    """Parse strings like "θ^2 + 2θ + 1" or "t**3-1".

    Coefficients are integers read in the prime field.
    """
    cleaned = text.replace(" ", "").replace("-", "+-")
    total = ThetaPoly(ctx, ())
    for raw in filter(None, cleaned.split("+")):
        sign = -1 if raw.startswith("-") else 1
        body = raw.lstrip("-")
        m = _TERM.match(body)
        if not m or not body:
            raise ValueError(f"cannot parse polynomial term {raw!r} in {text!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        if m.group(2) is None:
            deg = 0
            if not m.group(1):
                raise ValueError(f"cannot parse polynomial term {raw!r} in {text!r}")
        else:
            deg = int(m.group(3)) if m.group(3) else 1
        total = total + ThetaPoly.monomial(ctx, deg, ctx.element(sign * coeff))
    return total


def polys_below(ctx: FieldContext, degree_bound: int):
    """All polynomials of degree < degree_bound over F_q, zero first.

    Ordered by degree, then lexicographically in coefficient order, so sums
    over them are reproducible.
    """
    fq = ctx.fq_elements()
    yield ThetaPoly(ctx, ())
    nonzero = [c for c in fq if c]
    for d in range(degree_bound):
        for lead in nonzero:
            for rest in itertools.product(fq, repeat=d):
                yield ThetaPoly(ctx, tuple(rest) + (lead,))


def random_poly(ctx: FieldContext, degree: int, rng: Random, monic: bool = False) -> ThetaPoly:
    fq = ctx.fq_elements()
    coeffs = [rng.choice(fq) for _ in range(degree)]
    lead = 1 if monic else rng.choice([c for c in fq if c])
    return ThetaPoly(ctx, coeffs + [lead])
