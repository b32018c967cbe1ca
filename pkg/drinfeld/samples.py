"""Seeded sample points of the upper half plane for the identity checks.

Generic points are ramified monomial combinations w_i = theta^(a_i/m) + c_i
with the fractional parts a_i/m pairwise distinct mod 1, so that together
with 1 they are K_inf-independent; each is still run through the
separation test before use.  CM points come first when the field hosts them.
"""

from __future__ import annotations

import logging
import re
from fractions import Fraction
from random import Random

from drinfeld.errors import BudgetExceeded, FieldUnsupported, NotInOmega, PrecisionError
from drinfeld.finite_field import FieldContext
from drinfeld.lattice import UpperHalfPoint, cm_point, omega_r_check
from drinfeld.series import RamifiedSeries

_logger = logging.getLogger(__name__)

SAMPLE_TEST_DEGREE = 2
MAX_EXPONENT = 2  # |w_i| <= q^2 keeps the lattice layers short


def cm_samples(ctx: FieldContext, r: int) -> list[UpperHalfPoint]:
    """sqrt_theta (r = 2) and the Kummer point of rank r, when the field has them."""
    kinds = ["sqrt_theta"] if r == 2 else [f"kummer:{r}"]
    out = []
    for kind in kinds:
        try:
            out.append(cm_point(kind, ctx).point)
        except (FieldUnsupported, PrecisionError) as e:
            _logger.info("CM sample %s skipped: %s", kind, e)
    return out


def generic_point(ctx: FieldContext, r: int, rng: Random) -> UpperHalfPoint:
    m = ctx.m
    residues = list(range(1, m))
    if len(residues) < r - 1:
        raise FieldUnsupported(f"rank {r} samples need m >= {r}, got m={m}")
    rng.shuffle(residues)
    coords = []
    for frac in residues[: r - 1]:
        # a/m with a = frac mod m, somewhere in (0, MAX_EXPONENT]
        a = frac + m * rng.randrange(MAX_EXPONENT)
        w = RamifiedSeries.theta_power(ctx, Fraction(a, m))
        c = rng.choice(ctx.fq_elements())
        if c:
            w = w + RamifiedSeries.constant(ctx, c)
        coords.append(w)
    return UpperHalfPoint.from_coords(ctx, coords)


def sample_points(ctx: FieldContext, r: int, count: int, seed: int = 0,
                  include_cm: bool = True, test_degree: int = SAMPLE_TEST_DEGREE) -> list[UpperHalfPoint]:
    """*count* points of Omega^r, reproducible from *seed*."""
    rng = Random(seed)
    points = cm_samples(ctx, r)[:count] if include_cm else []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 20 * count:
            raise NotInOmega(f"could not draw {count} separated rank-{r} points")
        omega = generic_point(ctx, r, rng)
        try:
            omega_r_check(omega, test_degree)
        except (NotInOmega, BudgetExceeded) as e:
            _logger.debug("sample rejected: %s", e)
            continue
        points.append(omega)
    return points


# ==================== Parsing points from the command line ====================

_RAMIFIED_TERM = re.compile(
    r"^([0-9]*)\*?(?:(?:θ|theta)(?:\^\(?(-?[0-9]+(?:/[0-9]+)?)\)?)?)?$"
)


def parse_ramified(ctx: FieldContext, text: str) -> RamifiedSeries:
    """Exact finite sums like "θ^(3/4) + 2θ^(-1/2) + 1".

    Exponents must have denominators dividing m; coefficients are read in
    the prime field.
    """
    cleaned = re.sub(r"(?<![(^])-", "+-", text.replace(" ", ""))
    total = RamifiedSeries.zero(ctx)
    for raw in filter(None, cleaned.split("+")):
        sign = -1 if raw.startswith("-") else 1
        body = raw[1:] if sign < 0 else raw
        m = _RAMIFIED_TERM.match(body)
        if not m or not body:
            raise ValueError(f"cannot parse term {raw!r} in {text!r}")
        has_theta = "θ" in body or "theta" in body
        if not has_theta and not m.group(1):
            raise ValueError(f"cannot parse term {raw!r} in {text!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        exponent = Fraction(m.group(2)) if m.group(2) else Fraction(int(has_theta))
        c = ctx.element(sign * coeff)
        if c:
            total = total + RamifiedSeries.theta_power(ctx, exponent, c=c)
    return total


def parse_point(ctx: FieldContext, text: str, prec=None) -> UpperHalfPoint:
    """A CM kind ("sqrt_theta", "kummer:3", "quadratic:A,B") or the
    coordinates w_1; ...; w_{r-1} with the trailing 1 implied."""
    name = text.partition(":")[0].strip()
    if name in ("sqrt_theta", "kummer", "quadratic"):
        return cm_point(text.strip(), ctx, prec).point
    coords = [parse_ramified(ctx, part) for part in text.split(";")]
    return UpperHalfPoint.from_coords(ctx, coords)
