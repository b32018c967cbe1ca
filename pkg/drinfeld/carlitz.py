"""The Carlitz period and the ramified root it needs."""

from __future__ import annotations

import logging
from fractions import Fraction

from drinfeld.errors import FieldUnsupported
from drinfeld.finite_field import FieldContext
from drinfeld.series import INF, RamifiedSeries, to_T

_logger = logging.getLogger(__name__)


def theta(ctx: FieldContext) -> RamifiedSeries:
    return RamifiedSeries.theta_power(ctx, 1)


def carlitz_root(ctx: FieldContext, y: RamifiedSeries | None = None, prec=None) -> RamifiedSeries:
    """(-y)^(1/(q-1)).

    For y = theta (the default) this is zeta * theta^(1/(q-1)) with zeta the
    least (q-1)-st root of -1; other generators go through nth_root, which
    picks the least root of the leading coefficient the same way.
    """
    q = ctx.q
    if y is None:
        if ctx.zeta is None:
            raise FieldUnsupported(
                f"no (q-1)-st root of -1 in F_{ctx.order}; raise s"
            )
        if ctx.m % (q - 1):
            raise FieldUnsupported(f"theta^(1/{q - 1}) needs m divisible by {q - 1}, got m={ctx.m}")
        return RamifiedSeries.theta_power(ctx, Fraction(1, q - 1), c=ctx.zeta)
    if q == 2:
        return -y
    return (-y).nth_root(q - 1, prec)


def period_factor_count(ctx: FieldContext, prec, y_val: Fraction = Fraction(-1)) -> int:
    """Number of product factors (1 - y^(1-q^i))^(-1) that reach precision *prec*."""
    q = ctx.q
    lead_val = Fraction(q, q - 1) * y_val
    needed = Fraction(prec) - lead_val
    i = 0
    while (q ** (i + 1) - 1) * (-y_val) < needed:
        i += 1
    return i


def carlitz_period(ctx: FieldContext, prec, y: RamifiedSeries | None = None,
                   i_max: int | None = None) -> RamifiedSeries:
    """pi~ = -(-y)^(q/(q-1)) * prod_{i>=1} (1 - y^(1-q^i))^(-1), to absolute precision *prec*.

    With y omitted this is the period of the Carlitz module of F_q[theta];
    passing a ramified generator y with |y| > 1 gives the period of the
    Carlitz module of F_q[y] instead.  An explicit *i_max* truncates the
    product and the reported precision drops to what the omitted factors
    allow.
    """
    q = ctx.q
    yy = theta(ctx) if y is None else y
    if yy.is_zero() or yy.valuation >= 0:
        raise FieldUnsupported("Carlitz period needs a generator with |y| > 1")
    y_val = yy.valuation
    root = carlitz_root(ctx, y, prec)
    lead = -((-yy) * root)
    lead_val = Fraction(q, q - 1) * y_val
    needed = Fraction(prec) - lead_val
    count = period_factor_count(ctx, prec, y_val)
    target = Fraction(prec)
    if i_max is not None and i_max < count:
        omitted = (q ** (i_max + 1) - 1) * (-y_val)
        target = min(target, omitted + lead_val)
        count = i_max
    product = RamifiedSeries.one(ctx)
    for i in range(1, count + 1):
        y_qi = yy.frobenius_power(i)
        eps = yy.div(y_qi, prec=needed)
        factor = (RamifiedSeries.one(ctx) - eps).inverse(prec=needed)
        product = (product * factor).truncate(needed)
    _logger.debug("carlitz period: %d factors, target precision %s", count, target)
    return (lead * product).truncate(target)
