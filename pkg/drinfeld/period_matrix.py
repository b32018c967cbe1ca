"""Period matrices of Drinfeld modules and the rank-2 Legendre determinant."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from drinfeld.drinfeld_module import (
    DEFAULT_KMAX,
    REL_GUARD,
    DrinfeldModule,
    EntireSeries,
    entire_eval,
    exp_coeffs,
    quasi_period_coeffs,
    term_valuations,
)
from drinfeld.errors import InconclusiveRelation, NotAPeriod
from drinfeld.relations import RelationCertificate, RelationQuery, detect_relation
from drinfeld.series import RamifiedSeries

_logger = logging.getLogger(__name__)

PERIOD_THRESHOLD = Fraction(4, 5)


@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    """Row i is (-w_i, F_{tau^1}(w_i), ..., F_{tau^(r-1)}(w_i))."""

    entries: tuple[tuple[RamifiedSeries, ...], ...]
    basis: tuple[RamifiedSeries, ...]
    prec: Fraction

    @property
    def rank(self) -> int:
        return len(self.entries)

    def det(self) -> RamifiedSeries:
        return determinant(self.entries)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "prec": str(self.prec),
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }


def permutation_sign(perm) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def determinant(rows) -> RamifiedSeries:
    """Leibniz expansion; the ranks in play are small."""
    n = len(rows)
    ctx = rows[0][0].ctx
    total = RamifiedSeries.zero(ctx)
    for perm in itertools.permutations(range(n)):
        term = RamifiedSeries.constant(ctx, 1 if permutation_sign(perm) > 0 else ctx.minus_one)
        for i, j in enumerate(perm):
            term = term * rows[i][j]
        total = total + term
    return total


def exp_for_points(phi: DrinfeldModule, points, k_max: int = DEFAULT_KMAX, prec=None) -> EntireSeries:
    """exp_phi with enough relative precision that evaluating at every point
    reaches absolute precision *prec* despite large intermediate terms."""
    ctx = phi.ctx
    prec = Fraction(ctx.default_prec if prec is None else prec)
    exp = exp_coeffs(phi, k_max, prec + REL_GUARD)
    lowest = 0
    for w in points:
        if w.is_zero():
            continue
        lowest = min([lowest] + [v for v in term_valuations(exp, w) if v != math.inf])
    if lowest < 0:
        extra = Fraction(-lowest, ctx.m)
        _logger.debug("raising exp relative precision by %s for large arguments", extra)
        exp = exp_coeffs(phi, k_max, prec + REL_GUARD + extra)
    return exp


def period_matrix(phi: DrinfeldModule, basis, k_max: int = DEFAULT_KMAX, prec=None,
                  threshold=PERIOD_THRESHOLD) -> PeriodMatrix:
    """Assemble P_phi after checking exp_phi(w_i) vanishes to threshold * prec."""
    ctx = phi.ctx
    prec = Fraction(ctx.default_prec if prec is None else prec)
    basis = tuple(basis)
    if len(basis) != phi.rank:
        raise ValueError(f"rank {phi.rank} module needs {phi.rank} basis periods, got {len(basis)}")
    exp = exp_for_points(phi, basis, k_max, prec)
    rel = exp_coeffs_rel(exp, prec)
    quasi = [quasi_period_coeffs(phi, j, k_max, exp=exp, rel_prec=rel) for j in range(1, phi.rank)]
    rows = []
    for i, w in enumerate(basis):
        residual = entire_eval(exp, w, prec).val_bound()
        if residual < threshold * prec:
            raise NotAPeriod(f"exp(w_{i + 1}) has valuation {residual}, below {threshold * prec}")
        rows.append((-w,) + tuple(entire_eval(f, w, prec) for f in quasi))
    return PeriodMatrix(tuple(rows), basis, prec)


def exp_coeffs_rel(exp: EntireSeries, prec) -> Fraction:
    """Relative precision (theta-units) the exp coefficients were built with."""
    c = exp.coeffs[-1]
    if c.is_zero() or c.is_exact():
        return Fraction(prec) + REL_GUARD
    return Fraction(c.prec - c.val_T, exp.ctx.m)


def legendre_check(P: PeriodMatrix, pi_tilde: RamifiedSeries, d: int = 4, h: int = 8,
                   v_t=None) -> RelationCertificate:
    """Certify det(P)/pi~ as algebraic of degree <= d and height <= h."""
    if P.rank > 2:
        raise ValueError("the Legendre determinant is only handled up to rank 2")
    xi = P.det().div(pi_tilde)
    if v_t is None:
        v_t = Fraction(P.prec) / 2
    cert = detect_relation(RelationQuery(xi, d, h, Fraction(v_t)))
    if cert is None:
        raise InconclusiveRelation(f"no relation of degree <= {d}, height <= {h} for det(P)/pi~")
    return cert
