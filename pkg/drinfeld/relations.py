"""Algebraicity detector over A = F_q[theta] and the questions built on it.

A relation for xi is a nonzero P(X) = sum a_ij theta^j X^i with a_ij in F_q,
deg_X P <= d and every deg_theta <= h, such that P(xi) vanishes below a
target valuation.  Writing a_ij in an F_p-basis of F_q turns "every digit of
P(xi) below the target is zero" into a homogeneous linear system over F_p,
which linalg solves exactly.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from drinfeld.errors import BudgetExceeded, PrecisionError
from drinfeld.finite_field import FieldContext
from drinfeld.linalg import nullspace_mod_p, rank_mod_p, row_reduce
from drinfeld.series import INF, RamifiedSeries, to_T
from drinfeld.theta_poly import ThetaPoly, format_poly

_logger = logging.getLogger(__name__)

DEFAULT_SYSTEM_BUDGET = 4_000_000
SLACK = 10  # in T-units: never certify the last 10/m theta-units of a value


@dataclass(frozen=True, eq=False)
class RelationQuery:
    xi: RamifiedSeries
    d: int
    h: int
    v_t: Fraction

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"X-degree bound must be at least 1, got {self.d}")
        if self.h < 0:
            raise ValueError(f"theta-degree bound must be non-negative, got {self.h}")
        object.__setattr__(self, "v_t", Fraction(self.v_t))
        ctx = self.xi.ctx
        if not self.xi.is_exact() and to_T(ctx, self.v_t) > self.xi.prec - SLACK:
            raise PrecisionError(
                f"target valuation {self.v_t} too close to the precision {self.xi.precision} of the value"
            )


@dataclass(frozen=True, eq=False)
class RelationCertificate:
    ctx: FieldContext
    poly: tuple[ThetaPoly, ...]  # coefficient of X^i at index i
    achieved: Fraction | float
    d: int
    h: int
    v_t: Fraction
    prec: Fraction | float

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def height(self) -> int:
        return max(a.degree for a in self.poly)

    def evaluate(self, xi: RamifiedSeries) -> RamifiedSeries:
        return poly_eval(self.poly, xi)

    def describe(self) -> str:
        parts = []
        for i in range(self.degree, -1, -1):
            a = self.poly[i]
            if a.is_zero():
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            coeff = format_poly(a)
            if not mono:
                parts.append(f"({coeff})")
            elif coeff == "1":
                parts.append(mono)
            else:
                parts.append(f"({coeff}){mono}")
        return " + ".join(parts)

    def same_up_to_scalar(self, other: "RelationCertificate") -> bool:
        """Equal after normalization (both are scaled to a monic leading coefficient)."""
        return len(self.poly) == len(other.poly) and all(a == b for a, b in zip(self.poly, other.poly))

    def to_json(self) -> dict:
        return {
            "P": [a.to_json() for a in self.poly],
            "text": self.describe(),
            "val": _fmt(self.achieved),
            "bounds": {"d": self.d, "h": self.h, "v_t": _fmt(self.v_t)},
            "prec": _fmt(self.prec),
        }


def _fmt(value) -> str:
    return "inf" if value == INF else str(value)


def poly_eval(poly, xi: RamifiedSeries) -> RamifiedSeries:
    """sum a_i(theta) xi^i by Horner."""
    ctx = xi.ctx
    acc = RamifiedSeries.zero(ctx)
    for a in reversed(poly):
        acc = acc * xi + a.to_series()
    return acc


# ==================== Linear system ====================


def _columns(ctx: FieldContext, monomial_values, h: int, lo_T: int, hi_T: int) -> np.ndarray:
    """One column per (monomial, j, basis element): digits of beta theta^j value in [lo_T, hi_T)."""
    basis = ctx.fq_basis()
    cols = []
    for value in monomial_values:
        for j in range(h + 1):
            shifted = value.mul_theta_power(j)
            if shifted.prec < hi_T:
                raise PrecisionError(
                    f"a column is only known to {shifted.precision}, need {Fraction(hi_T, ctx.m)}"
                )
            for beta in basis:
                cols.append(shifted.scale(beta).digits_window(lo_T, hi_T).ravel())
    return np.stack(cols, axis=1)


def _window(ctx: FieldContext, monomial_values, h: int, v_t: Fraction, budget: int) -> tuple[int, int]:
    hi_T = to_T(ctx, v_t)
    starts = [v.val_T for v in monomial_values if not v.is_zero()]
    if not starts:
        raise PrecisionError("every monomial value is numerically zero")
    lo_T = min(starts) - h * ctx.m
    if hi_T <= lo_T:
        raise PrecisionError(f"target valuation {v_t} is below every term; nothing to solve")
    n_cols = len(monomial_values) * (h + 1) * ctx.e
    n_rows = (hi_T - lo_T) * ctx.n
    if n_rows * n_cols > budget:
        raise BudgetExceeded(f"relation system {n_rows}x{n_cols} exceeds budget {budget}")
    if n_rows <= n_cols:
        _logger.warning("relation system %dx%d is underdetermined; kernel is not evidence", n_rows, n_cols)
    return lo_T, hi_T


def _vector_to_coeffs(ctx: FieldContext, vec: np.ndarray, n_monomials: int, h: int) -> list[ThetaPoly]:
    basis = ctx.fq_basis()
    e = len(basis)
    out = []
    for mono in range(n_monomials):
        coeffs = []
        for j in range(h + 1):
            c = 0
            for b, beta in enumerate(basis):
                digit = int(vec[(mono * (h + 1) + j) * e + b])
                if digit:
                    c = ctx.add(c, ctx.mul(ctx.element(digit), beta))
            coeffs.append(c)
        out.append(ThetaPoly(ctx, coeffs))
    return out


def _normalize(ctx: FieldContext, poly: list[ThetaPoly]) -> list[ThetaPoly]:
    while poly and poly[-1].is_zero():
        poly.pop()
    inv = ctx.inv(poly[-1].leading())
    return [a.scale(inv) for a in poly]


def detect_relation(query: RelationQuery, budget: int = DEFAULT_SYSTEM_BUDGET) -> RelationCertificate | None:
    """Smallest relation for query.xi within the bounds, or None.

    Columns run over (X-degree, theta-degree, basis element) in increasing
    order, so the first kernel vector has the least leading monomial: for an
    algebraic xi inside the bounds it is a multiple of the minimal polynomial
    by an element of A of least degree.
    """
    xi = query.xi
    ctx = xi.ctx
    powers = [RamifiedSeries.one(ctx)]
    for _ in range(query.d):
        powers.append(powers[-1] * xi)
    lo_T, hi_T = _window(ctx, powers, query.h, query.v_t, budget)
    M = _columns(ctx, powers, query.h, lo_T, hi_T)
    kernel = nullspace_mod_p(M, ctx.p)
    _logger.debug("relation system %s, kernel dimension %d", M.shape, len(kernel))
    if not kernel:
        return None
    poly = _normalize(ctx, _vector_to_coeffs(ctx, kernel[0], query.d + 1, query.h))
    achieved = poly_eval(poly, xi).val_bound()
    if achieved < query.v_t:
        _logger.warning("candidate relation fails re-evaluation (%s < %s)", achieved, query.v_t)
        return None
    return RelationCertificate(ctx, tuple(poly), achieved, query.d, query.h, query.v_t, xi.precision)


# ==================== CM values ====================


@dataclass
class CertifiedValue:
    label: str
    certificate: RelationCertificate | None
    error: str | None = None

    @property
    def found(self) -> bool:
        return self.certificate is not None

    def to_json(self) -> dict:
        out = {"label": self.label, "found": self.found}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.error:
            out["error"] = self.error
        return out


def cm_value_certify(values, reference: RamifiedSeries, d: int, h: int, v_t,
                     budget: int = DEFAULT_SYSTEM_BUDGET) -> list[CertifiedValue]:
    """Run the detector on value / reference for every (label, value) pair.

    Inconclusive entries are logged and returned with certificate None;
    precision problems are recorded per entry rather than raised.
    """
    out = []
    for label, value in values:
        try:
            ratio = value.div(reference)
            cert = detect_relation(RelationQuery(ratio, d, h, Fraction(v_t)), budget)
        except PrecisionError as exc:
            _logger.warning("cm value %s: %s", label, exc)
            out.append(CertifiedValue(label, None, str(exc)))
            continue
        if cert is None:
            _logger.warning("cm value %s: no relation within d=%s h=%s", label, d, h)
        out.append(CertifiedValue(label, cert))
    return out


# ==================== Transcendence degree ====================


@dataclass(frozen=True)
class TrdegPrediction:
    ranks: tuple[int, ...]
    predicted: int | Fraction
    hypotheses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "ranks": list(self.ranks),
            "predicted": str(self.predicted),
            "hypotheses": dict(self.hypotheses),
        }


def trdeg_predict(ranks, pairwise_disjoint: bool = True, galois: bool = True,
                  s: int | None = None) -> TrdegPrediction:
    """Predicted transcendence degree of the periods and quasi-periods.

    One module with endomorphism degree *s*: r^2 / s.  Several rank >= 2
    modules with pairwise disjoint CM fields: (r_1 + ... + r_n) - (n - 1).
    """
    ranks = tuple(int(r) for r in ranks)
    if not ranks:
        raise ValueError("at least one rank is needed")
    hypotheses = {
        "pairwise_disjoint": pairwise_disjoint,
        "galois": galois,
        "ranks_at_least_2": all(r >= 2 for r in ranks),
    }
    if len(ranks) == 1 and s is not None:
        value = Fraction(ranks[0] ** 2, s)
        hypotheses["s"] = s
        return TrdegPrediction(ranks, int(value) if value.denominator == 1 else value, hypotheses)
    return TrdegPrediction(ranks, sum(ranks) - (len(ranks) - 1), hypotheses)


# ==================== Multivariate probe ====================


def monomials(n_vars: int, total_degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree <= total_degree, graded lexicographic."""
    out = [e for e in itertools.product(range(total_degree + 1), repeat=n_vars) if sum(e) <= total_degree]
    return sorted(out, key=lambda e: (sum(e), e))


@dataclass
class IndependenceReport:
    n_values: int
    total_degree: int
    h: int
    v_t: Fraction
    kernel_dim: int
    trivial_rank: int
    univariate: list
    relations: list = field(default_factory=list)

    @property
    def cross_relations(self) -> int:
        return self.kernel_dim - self.trivial_rank

    @property
    def independent(self) -> bool:
        return self.cross_relations == 0

    def to_json(self) -> dict:
        return {
            "n_values": self.n_values,
            "total_degree": self.total_degree,
            "h": self.h,
            "v_t": str(self.v_t),
            "kernel_dim": self.kernel_dim,
            "trivial_rank": self.trivial_rank,
            "cross_relations": self.cross_relations,
            "independent_at_bounds": self.independent,
            "univariate": self.univariate,
            "relations": self.relations,
        }


def _format_multivariate(terms: dict, names) -> str:
    parts = []
    for e, a in terms.items():
        mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(names, e) if k)
        coeff = format_poly(a)
        if not mono:
            parts.append(f"({coeff})")
        elif coeff == "1":
            parts.append(mono)
        else:
            parts.append(f"({coeff}){mono}")
    return " + ".join(reversed(parts))


def independence_probe(values, total_degree: int, h: int, v_t,
                       budget: int = DEFAULT_SYSTEM_BUDGET, max_listed: int = 4) -> IndependenceReport:
    """Search for polynomial relations among several values.

    The kernel of the monomial system is compared against the span of
    monomial and theta multiples of each value's own minimal relation; what
    is left over counts as cross relations.  None found is bounded negative
    evidence for algebraic independence, never a proof.
    """
    values = list(values)
    ctx = values[0].ctx
    v_t = Fraction(v_t)
    n = len(values)
    monos = monomials(n, total_degree)
    index = {e: k for k, e in enumerate(monos)}

    # powers[i][k] = values[i]^k
    powers = []
    for x in values:
        row = [RamifiedSeries.one(ctx)]
        for _ in range(total_degree):
            row.append(row[-1] * x)
        powers.append(row)
    mono_values = []
    for e in monos:
        acc = RamifiedSeries.one(ctx)
        for i, k in enumerate(e):
            if k:
                acc = acc * powers[i][k]
        mono_values.append(acc)

    lo_T, hi_T = _window(ctx, mono_values, h, v_t, budget)
    M = _columns(ctx, mono_values, h, lo_T, hi_T)
    kernel = nullspace_mod_p(M, ctx.p)

    univariate = []
    trivial = []
    basis = ctx.fq_basis()
    e_dim = len(basis)
    width = len(monos) * (h + 1) * e_dim
    for i, x in enumerate(values):
        cert = detect_relation(RelationQuery(x, total_degree, h, v_t), budget)
        univariate.append(None if cert is None else cert.describe())
        if cert is None:
            continue
        # monomial multiples X^e * theta^j * beta * P_i(x_i) that stay inside the bounds
        for shift in monos:
            if sum(shift) + cert.degree > total_degree:
                continue
            for j in range(h - cert.height + 1):
                for b, beta in enumerate(basis):
                    vec = np.zeros(width, dtype=np.int64)
                    for k, a in enumerate(cert.poly):
                        e = list(shift)
                        e[i] += k
                        col0 = index[tuple(e)]
                        for deg, c in enumerate(a.coeffs):
                            if c == 0:
                                continue
                            coeff = ctx.mul(c, beta)
                            vec[_column_slice(col0, deg + j, h, e_dim)] = _fq_coords(ctx, coeff, basis)
                    trivial.append(vec)
    trivial_rank = rank_mod_p(np.array(trivial), ctx.p) if trivial else 0

    names = [f"x{i + 1}" for i in range(n)]
    listed = []
    for vec in kernel[:max_listed]:
        coeffs = _vector_to_coeffs(ctx, vec, len(monos), h)
        terms = {monos[k]: a for k, a in enumerate(coeffs) if not a.is_zero()}
        listed.append(_format_multivariate(terms, names))
    report = IndependenceReport(n, total_degree, h, v_t, len(kernel), trivial_rank, univariate, listed)
    _logger.info("independence probe: kernel %d, trivial %d", report.kernel_dim, report.trivial_rank)
    return report


def _column_slice(mono: int, j: int, h: int, e_dim: int) -> slice:
    start = (mono * (h + 1) + j) * e_dim
    return slice(start, start + e_dim)


def _fq_coords(ctx: FieldContext, c: int, basis) -> np.ndarray:
    """Coordinates of c in F_q over the F_p-basis *basis*."""
    rows = np.array([ctx.digits[b] for b in basis]).T
    target = ctx.digits[c]
    aug = np.concatenate([rows, target[:, None]], axis=1)
    R, pivots = row_reduce(aug, ctx.p, n_pivot_cols=len(basis))
    coords = np.zeros(len(basis), dtype=np.int64)
    for row, pc in enumerate(pivots):
        coords[pc] = R[row, -1]
    return coords
