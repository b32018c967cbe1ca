"""A-lattices, points of the Drinfeld upper half plane, lattice exponentials
and CM points.

Lattice exponentials are built layer by layer.  V_D is the F_q-span of
theta^j w_i for j < D, and its exponential e_V(z) = z prod_{0 != l in V}(1 - z/l)
is a q-polynomial.  Adding one vector v updates it by

    e_{V + F_q v}(z) = e_V(z) - e_V(z)^q / e_V(v)^(q-1)

so a layer costs r coefficient updates instead of q^r product factors.  The
rest of the lattice enters through e_V(Lambda), whose nonzero elements are
at least as large as mu_min = min |e_V(theta^D b.w)| over b in F_q^r.  That
bounds e_Lambda(z) / e_V(z) - 1 by (|e_V(z)| / mu_min)^(q-1).
"""

from __future__ import annotations

import itertools
import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from drinfeld.carlitz import carlitz_period, theta
from drinfeld.drinfeld_module import REL_GUARD, DrinfeldModule, EntireSeries
from drinfeld.errors import (
    BudgetExceeded,
    ConvergenceError,
    FieldUnsupported,
    NotInOmega,
    PoleError,
    PrecisionError,
)
from drinfeld.finite_field import FieldContext
from drinfeld.series import INF, RamifiedSeries, to_T
from drinfeld.theta_poly import ThetaPoly, parse_poly
from drinfeld.twisted_poly import TwistedPoly

_logger = logging.getLogger(__name__)

DEFAULT_TEST_DEGREE = 4
DEFAULT_ENUM_BUDGET = 200_000
MAX_LAYER_DIM = 96
DENSE_LIMIT = 256
_CHUNK = 4096


def imag_abs(x: RamifiedSeries) -> Fraction | None:
    """log_q of |x|_i = inf_{y in K_inf} |x - y|; None when x is in K_inf to precision."""
    ctx = x.ctx
    if x.is_zero():
        return None
    fq = set(ctx.fq_elements())
    keep = [(e, c) for e, c in x.terms() if e % ctx.m or c not in fq]
    if not keep:
        return None
    return -Fraction(min(e for e, _ in keep), ctx.m)


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    ctx: FieldContext
    basis: tuple[RamifiedSeries, ...]
    normalized: bool = False

    @property
    def rank(self) -> int:
        return len(self.basis)

    def scaled(self, c: RamifiedSeries) -> "LatticeSpec":
        return LatticeSpec(self.ctx, tuple(c * w for w in self.basis), False)

    def reduced(self, max_steps: int = 256) -> "LatticeSpec":
        """An A-basis of the same lattice with |sum a_i w_i| = max |a_i w_i|.

        The layer bounds assume this.  While some F_q-combination of
        theta-shifted basis vectors cancels at its leading term, the largest
        vector taking part is replaced by that combination, which is strictly
        smaller and keeps a unit coefficient on the replaced vector.
        """
        basis = list(self.basis)
        for _ in range(max_steps):
            step = _reduction_step(self.ctx, basis)
            if step is None:
                break
            k, shorter = step
            _logger.debug("basis vector %d: valuation %s -> %s", k, basis[k].valuation, shorter.valuation)
            basis[k] = shorter
        else:
            raise ConvergenceError(f"basis reduction did not finish in {max_steps} steps")
        if all(a is b for a, b in zip(basis, self.basis)):
            return self
        return LatticeSpec(self.ctx, tuple(basis), False)

    def combination(self, coeffs) -> RamifiedSeries:
        """sum b_i(theta) w_i for ThetaPoly (or F_q int) coefficients."""
        acc = RamifiedSeries.zero(self.ctx)
        for b, w in zip(coeffs, self.basis):
            if isinstance(b, int):
                if b:
                    acc = acc + w.scale(b)
            elif not b.is_zero():
                acc = acc + b.to_series() * w
        return acc

    def to_json(self) -> dict:
        return {"rank": self.rank, "basis": [w.to_json() for w in self.basis]}


def _reduction_step(ctx: FieldContext, basis: list[RamifiedSeries]):
    """(index, shorter vector) for one leading-term cancellation, or None."""
    for i, w in enumerate(basis):
        if w.is_zero():
            raise NotInOmega(f"basis vector {i} vanishes to precision")
    m = ctx.m
    classes: dict[int, list[int]] = {}
    for i, w in enumerate(basis):
        classes.setdefault(w.val_T % m, []).append(i)
    for members in classes.values():
        if len(members) < 2:
            continue
        leads = [basis[i].leading() for i in members]
        for b in projective_vectors(ctx, len(members)):
            used = [(i, c) for i, c in zip(members, b) if c]
            if len(used) < 2:
                continue
            total = 0
            for c, lead in zip(b, leads):
                total = ctx.add(total, ctx.mul(c, lead))
            if total:
                continue
            k = min((i for i, _ in used), key=lambda i: basis[i].val_T)
            top = basis[k].val_T
            shorter = RamifiedSeries.zero(ctx)
            for i, c in used:
                shorter = shorter + basis[i].mul_theta_power((basis[i].val_T - top) // m).scale(c)
            if shorter.is_zero():
                raise NotInOmega("lattice basis is dependent to precision")
            return k, shorter
    return None


@dataclass(frozen=True, eq=False)
class UpperHalfPoint:
    """(w_1, ..., w_{r-1}, 1)."""

    ctx: FieldContext
    coords: tuple[RamifiedSeries, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("a point needs at least one coordinate")
        if not (coords[-1].is_exact() and coords[-1] == RamifiedSeries.one(self.ctx)):
            raise ValueError("the last coordinate of a point must be exactly 1")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_coords(cls, ctx: FieldContext, coords) -> "UpperHalfPoint":
        return cls(ctx, tuple(coords) + (RamifiedSeries.one(ctx),))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def lattice(self) -> LatticeSpec:
        return LatticeSpec(self.ctx, self.coords, normalized=True)

    def abs_exponent(self) -> Fraction:
        """log_q |omega|_inf = max log_q |w_i|."""
        return max(w.abs_exponent() for w in self.coords if not w.is_zero())

    def tail(self) -> "UpperHalfPoint":
        """omega~ = (w_2, ..., w_r), a point of rank r - 1."""
        if self.rank < 2:
            raise ValueError("rank-1 points have no tail")
        return UpperHalfPoint(self.ctx, self.coords[1:])

    def pair(self, u) -> RamifiedSeries:
        """u . omega for a vector of ThetaPoly / series / int entries."""
        acc = RamifiedSeries.zero(self.ctx)
        for a, w in zip(u, self.coords):
            if isinstance(a, ThetaPoly):
                a = a.to_series()
            elif isinstance(a, int):
                a = RamifiedSeries.constant(self.ctx, self.ctx.element(a))
            acc = acc + a * w
        return acc

    def to_json(self) -> dict:
        return {"rank": self.rank, "coords": [w.to_json() for w in self.coords]}


# ==================== Upper half plane test ====================


@dataclass(frozen=True)
class SeparationCertificate:
    iota: Fraction  # log_q of the separation constant
    degree: int
    tested: int

    def to_json(self) -> dict:
        return {"iota": str(self.iota), "degree": self.degree, "tested": self.tested}


def _digit_rows(series_list, lo_T: int, hi_T: int) -> np.ndarray:
    return np.stack([s.digits_window(lo_T, hi_T).ravel() for s in series_list])


def _fp_combinations(p: int, k: int) -> np.ndarray:
    return np.array(list(itertools.product(range(p), repeat=k)), dtype=np.int64).reshape(-1, k)


def omega_r_check(omega: UpperHalfPoint, degree: int = DEFAULT_TEST_DEGREE,
                  budget: int = DEFAULT_ENUM_BUDGET) -> SeparationCertificate:
    """Separation constant of omega over all nonzero b in (A_{<degree})^r.

    iota = min log_q (|b.omega| / max_i |b_i| |w_i|).  The degree is lowered
    (with a warning) until the enumeration fits the budget; the certificate
    records the degree actually tested.  Raises NotInOmega when some tested
    combination vanishes to precision.
    """
    ctx = omega.ctx
    r = omega.rank
    e = ctx.e
    requested = degree
    while degree > 1 and ctx.q ** (r * degree) > budget:
        degree -= 1
    if ctx.q ** (r * degree) > budget:
        raise BudgetExceeded(f"Omega^{r} test needs {ctx.q ** (r * degree)} combinations")
    if degree < requested:
        _logger.warning("Omega^%d test limited to degree < %d by the budget", r, degree)
    basis = ctx.fq_basis()
    gens = []  # (coordinate, theta-degree, basis element) in that order
    for w in omega.coords:
        for j in range(degree):
            for beta in basis:
                gens.append(w.mul_theta_power(j).scale(beta))
    lo_T = min(g.val_T for g in gens if not g.is_zero())
    hi_T = min(min(g.prec for g in gens), lo_T + to_T(ctx, ctx.default_prec))
    S = _digit_rows(gens, lo_T, hi_T)
    # |w_i| and the theta-degree, both in T-units, for the normalizing max
    abs_T = np.array([-w.val_T for w in omega.coords], dtype=np.int64)
    C_all = _fp_combinations(ctx.p, len(gens))[1:]
    best = None
    for start in range(0, len(C_all), _CHUNK):
        C = C_all[start : start + _CHUNK]
        rows_nonzero = ((C @ S) % ctx.p).reshape(len(C), hi_T - lo_T, ctx.n).any(axis=2)
        alive = rows_nonzero.any(axis=1)
        if not alive.all():
            bad = C[int(np.argmin(alive))]
            raise NotInOmega(f"combination {bad.tolist()} vanishes to precision")
        val_T = rows_nonzero.argmax(axis=1) + lo_T
        blocks = C.reshape(len(C), r, degree, e).any(axis=3)
        has = blocks.any(axis=2)
        deg = degree - 1 - blocks[:, :, ::-1].argmax(axis=2)
        norm_T = np.where(has, deg * ctx.m + abs_T, np.iinfo(np.int64).min).max(axis=1)
        chunk_best = int((-val_T - norm_T).min())
        best = chunk_best if best is None else min(best, chunk_best)
    iota = Fraction(best, ctx.m)
    _logger.debug("Omega^%d test: %d combinations, iota=%s", r, len(C_all), iota)
    return SeparationCertificate(iota, degree, len(C_all))


# ==================== Lattice exponentials ====================


def _frob_rel(x: RamifiedSeries, k: int, rel_T: int) -> RamifiedSeries:
    if x.is_zero():
        return x.frobenius_power(k)
    return x.frobenius_power(k, x.val_T * x.ctx.q ** k + rel_T)


def qpoly_eval(coeffs, z: RamifiedSeries) -> RamifiedSeries:
    return TwistedPoly(z.ctx, tuple(coeffs)).apply(z)


def add_vector(coeffs: list[RamifiedSeries], v: RamifiedSeries, rel_T: int) -> list[RamifiedSeries]:
    """Coefficients of e_{V + F_q v} from those of e_V."""
    ctx = v.ctx
    q = ctx.q
    mu = qpoly_eval(coeffs, v)
    if mu.is_zero():
        raise PoleError("vector lies in the span already built (e_V(v) vanishes)")
    scale = mu.inverse() ** (q - 1)
    out = [coeffs[0]]
    padded = list(coeffs) + [RamifiedSeries.zero(ctx)]
    for k in range(1, len(padded)):
        update = _frob_rel(padded[k - 1], 1, rel_T) * scale
        out.append((padded[k] - update).with_relative_T(rel_T))
    return out


def subspace_exp(ctx: FieldContext, vectors, rel_prec=None) -> EntireSeries:
    """e_V for V the F_q-span of *vectors* (which must be independent)."""
    rel_T = to_T(ctx, ctx.default_prec + REL_GUARD if rel_prec is None else rel_prec)
    coeffs = [RamifiedSeries.one(ctx)]
    for v in vectors:
        coeffs = add_vector(coeffs, v, rel_T)
    return EntireSeries(ctx, tuple(coeffs), label="e_V", complete=True)


def projective_vectors(ctx: FieldContext, r: int):
    """Nonzero b in F_q^r with first nonzero entry 1."""
    fq = ctx.fq_elements()
    for b in itertools.product(fq, repeat=r):
        nz = [c for c in b if c]
        if nz and nz[0] == 1:
            yield b


def layer_vectors(lattice: LatticeSpec, j: int) -> list[RamifiedSeries]:
    return [w.mul_theta_power(j) for w in lattice.basis]


@dataclass(frozen=True, eq=False)
class LatticeExponential:
    lattice: LatticeSpec
    degree: int
    series: EntireSeries
    stabilization: tuple  # val(beta_k(D) - beta_k(D-1)), theta-units
    next_layer_val: Fraction  # largest val of e_V(theta^D b.w), b in F_q^r \ 0

    @property
    def ctx(self) -> FieldContext:
        return self.lattice.ctx

    @property
    def coeffs(self) -> tuple[RamifiedSeries, ...]:
        return self.series.coeffs

    def coefficient(self, k: int) -> RamifiedSeries:
        """beta_k of e_Lambda, capped at the precision the next layer allows."""
        ctx = self.ctx
        if k == 0:
            return self.coeffs[0]
        if k >= len(self.coeffs):
            raise ConvergenceError(f"coefficient {k} needs more than {self.degree} layers")
        c = self.coeffs[k]
        prev = self.coeffs[k - 1]
        if prev.is_zero():
            return c
        cap = Fraction(ctx.q * prev.val_T, ctx.m) - (ctx.q - 1) * self.next_layer_val
        return c.truncate(cap)

    def tail_exponent(self, z_val: Fraction) -> Fraction:
        """Valuation bound of e_Lambda(z)/e_V(z) - 1 for val(e_V(z)) = z_val."""
        return (self.ctx.q - 1) * (z_val - self.next_layer_val)

    def evaluate(self, z: RamifiedSeries, prec=None) -> RamifiedSeries:
        """e_Lambda(z) from e_V(z), truncated where the layer bound stops."""
        ctx = self.ctx
        target = Fraction(ctx.default_prec if prec is None else prec)
        y = qpoly_eval(self.coeffs, z)
        if y.is_zero():
            return y.truncate(target)
        bound = y.valuation + self.tail_exponent(y.valuation)
        return y.truncate(min(target, bound))

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "next_layer_val": str(self.next_layer_val),
            "stabilization": [None if s is None else str(s) for s in self.stabilization],
            "coeffs": [c.to_json() for c in self.coeffs[: self.lattice.rank + 1]],
        }


def _next_layer_val(ctx: FieldContext, coeffs, lattice: LatticeSpec, degree: int) -> Fraction:
    top = layer_vectors(lattice, degree)
    worst = None
    for b in projective_vectors(ctx, lattice.rank):
        v = RamifiedSeries.zero(ctx)
        for c, w in zip(b, top):
            if c:
                v = v + w.scale(c)
        mu = qpoly_eval(coeffs, v)
        if mu.is_zero():
            raise NotInOmega("next-layer vector lies in the truncated lattice")
        val = mu.valuation
        worst = val if worst is None else max(worst, val)
    return worst


def _dense_product(lattice: LatticeSpec, degree: int, prec) -> list[RamifiedSeries]:
    """z prod (1 - z/l) expanded in full; checks the non-q-power coefficients vanish."""
    ctx = lattice.ctx
    q = ctx.q
    polys = [ThetaPoly(ctx, c) for c in _coeff_tuples(ctx, degree)]
    poly = [RamifiedSeries.zero(ctx), RamifiedSeries.one(ctx)]
    for b in itertools.product(polys, repeat=lattice.rank):
        if all(x.is_zero() for x in b):
            continue
        inv = lattice.combination(b).inverse(prec)
        shifted = [RamifiedSeries.zero(ctx)] + poly
        poly = [a - (s * inv) for a, s in zip(poly + [RamifiedSeries.zero(ctx)], shifted)]
    powers = {q ** k for k in range(lattice.rank * degree + 1)}
    for j, c in enumerate(poly):
        if j not in powers and not c.is_zero():
            raise PrecisionError(f"coefficient of z^{j} does not vanish (valuation {c.valuation})")
    return [poly[q ** k] for k in range(lattice.rank * degree + 1)]


def _coeff_tuples(ctx: FieldContext, degree: int):
    return itertools.product(ctx.fq_elements(), repeat=degree)


def lattice_exp_product(lattice: LatticeSpec, degree: int, prec=None, method: str = "layers",
                        budget: int = DEFAULT_ENUM_BUDGET) -> LatticeExponential:
    """e_{V_D} for V_D = (A_{<D})^r . basis, with stabilization data.

    method "layers" uses the subspace recursion; "product" expands the
    product over all q^(rD) - 1 lattice points directly and is only meant
    for small cases.
    """
    ctx = lattice.ctx
    prec = Fraction(ctx.default_prec if prec is None else prec)
    rel_T = to_T(ctx, prec + REL_GUARD)
    dim = lattice.rank * degree
    if dim > MAX_LAYER_DIM:
        raise BudgetExceeded(f"{dim} layer vectors exceed the limit {MAX_LAYER_DIM}")

    coeffs = [RamifiedSeries.one(ctx)]
    previous = list(coeffs)
    for j in range(degree):
        previous = list(coeffs)
        for v in layer_vectors(lattice, j):
            coeffs = add_vector(coeffs, v, rel_T)
        _logger.debug("lattice layer %d added, %d coefficients", j, len(coeffs))

    if method == "product":
        if ctx.q ** dim > min(budget, DENSE_LIMIT):
            raise BudgetExceeded(f"direct product over {ctx.q ** dim} points is too large")
        coeffs = _dense_product(lattice, degree, prec + REL_GUARD)
    elif method != "layers":
        raise ValueError(f"unknown method {method!r}")

    stabilization = []
    for k in range(len(coeffs)):
        old = previous[k] if k < len(previous) else RamifiedSeries.zero(ctx)
        diff = coeffs[k] - old
        stabilization.append(None if diff.val_bound() == INF else diff.val_bound())
    next_val = _next_layer_val(ctx, coeffs, lattice, degree)
    series = EntireSeries(ctx, tuple(coeffs), label=f"e_V(D={degree})", complete=True)
    return LatticeExponential(lattice, degree, series, tuple(stabilization), next_val)


def drinfeld_from_lattice(lattice: LatticeSpec, degree: int, prec=None) -> DrinfeldModule:
    """g_k = beta_k (theta^(q^k) - theta) - sum_{i=1}^{k-1} g_i beta_{k-i}^(q^i), k = 1..r."""
    ctx = lattice.ctx
    lattice = lattice.reduced()
    prec = Fraction(ctx.default_prec if prec is None else prec)
    lexp = lattice_exp_product(lattice, degree, prec)
    rel_T = to_T(ctx, prec + REL_GUARD)
    g: list[RamifiedSeries] = []
    for k in range(1, lattice.rank + 1):
        beta = lexp.coefficient(k)
        gap = RamifiedSeries.theta_power(ctx, ctx.q ** k) - theta(ctx)
        acc = beta * gap
        for i in range(1, k):
            acc = acc - g[i - 1] * _frob_rel(lexp.coefficient(k - i), i, rel_T)
        g.append(acc)
    if g[-1].is_zero():
        raise ConvergenceError(f"g_{lattice.rank} is zero to precision; raise the layer degree")
    return DrinfeldModule(ctx, tuple(g))


# ==================== CM points ====================


@dataclass(frozen=True, eq=False)
class CMPoint:
    """A CM point with multiplier c: c * basis = M * basis over A.

    *generator* is y with Lambda_omega = F_q[y] when that holds; then the
    Carlitz module of F_q[y] has period lattice pi~_y Lambda_omega and pi~_y
    plays the role of lambda_omega.  *theta_in_y* writes theta as a
    polynomial in y with F_q coefficients.
    """

    kind: str
    point: UpperHalfPoint
    multiplier: RamifiedSeries
    matrix: tuple[tuple[ThetaPoly, ...], ...]
    generator: RamifiedSeries | None = None
    theta_in_y: tuple[int, ...] | None = None
    _lam_cache: dict = field(default_factory=dict, repr=False)

    @property
    def ctx(self) -> FieldContext:
        return self.point.ctx

    def check_multiplier(self) -> bool:
        ctx = self.ctx
        basis = self.point.coords
        for row, w in zip(self.matrix, basis):
            rhs = RamifiedSeries.zero(ctx)
            for a, b in zip(row, basis):
                if not a.is_zero():
                    rhs = rhs + a.to_series() * b
            if not (self.multiplier * w).agrees_with(rhs):
                return False
        return True

    def lam(self, prec) -> RamifiedSeries:
        """lambda_omega = pi~_y."""
        if self.generator is None:
            raise FieldUnsupported(f"{self.kind}: lambda_omega needs Lambda_omega = F_q[y]")
        key = Fraction(prec)
        if key not in self._lam_cache:
            self._lam_cache[key] = carlitz_period(self.ctx, prec, y=self.generator)
        return self._lam_cache[key]

    def drinfeld_module(self) -> DrinfeldModule:
        """The Carlitz module of F_q[y] restricted to A: t -> C_{theta(y)}."""
        if self.theta_in_y is None:
            raise FieldUnsupported(f"{self.kind}: no polynomial expression of theta in y")
        ctx = self.ctx
        y = self.generator
        c_y = TwistedPoly(ctx, (y, RamifiedSeries.one(ctx)))
        result = TwistedPoly(ctx, ())
        for c in reversed(self.theta_in_y):
            result = result * c_y + TwistedPoly.scalar(ctx, RamifiedSeries.constant(ctx, c))
        if not result.coefficient(0).agrees_with(theta(ctx)):
            raise PrecisionError("constant term of phi_t is not theta")
        return DrinfeldModule(ctx, result.coeffs[1:])

    def period_basis(self, prec) -> tuple[RamifiedSeries, ...]:
        lam = self.lam(prec)
        return tuple(lam * w for w in self.point.coords)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "point": self.point.to_json(),
            "multiplier": self.multiplier.to_json(),
            "matrix": [[a.to_json() for a in row] for row in self.matrix],
        }


def _zero_poly(ctx):
    return ThetaPoly(ctx, ())


def _kummer(ctx: FieldContext, r: int) -> CMPoint:
    if r < 2:
        raise ValueError("Kummer points need rank at least 2")
    if ctx.m % r:
        raise FieldUnsupported(f"theta^(1/{r}) needs m divisible by {r}, got m={ctx.m}")
    if r % ctx.p == 0:
        raise FieldUnsupported(f"theta^(1/{r}) is inseparable in characteristic {ctx.p}")
    y = RamifiedSeries.theta_power(ctx, Fraction(1, r))
    coords = [RamifiedSeries.theta_power(ctx, Fraction(i, r)) for i in range(1, r)]
    point = UpperHalfPoint.from_coords(ctx, coords)
    one = ThetaPoly.constant(ctx, 1)
    rows = []
    for i in range(r):
        row = [_zero_poly(ctx)] * r
        if i < r - 2:
            row[i + 1] = one
        elif i == r - 2:
            row[r - 1] = ThetaPoly.theta(ctx)
        else:
            row[0] = one
        rows.append(tuple(row))
    kind = "sqrt_theta" if r == 2 else f"kummer:{r}"
    return CMPoint(kind, point, y, tuple(rows), y, (0,) * r + (1,))


def _quadratic(ctx: FieldContext, a: ThetaPoly, b: ThetaPoly, prec) -> CMPoint:
    if b.is_zero():
        raise ValueError("radicand must be nonzero")
    sqrt_b = b.to_series().sqrt(prec)
    if not (sqrt_b * sqrt_b).agrees_with(b.to_series()):
        raise PrecisionError("square root of the radicand did not verify")
    if imag_abs(sqrt_b) is None:
        raise NotInOmega(f"sqrt({b}) lies in K_inf; the point is not in Omega^2")
    omega1 = a.to_series() + sqrt_b
    point = UpperHalfPoint.from_coords(ctx, [omega1])
    matrix = ((a, b - a * a), (ThetaPoly.constant(ctx, 1), -a))
    generator = theta_in_y = None
    if b.degree == 1 and b.is_monic():
        generator = sqrt_b
        c = b.coeffs[0]
        theta_in_y = (ctx.neg(c), 0, 1)
    return CMPoint(f"quadratic:{a},{b}", point, sqrt_b, matrix, generator, theta_in_y)


def cm_point(kind: str, ctx: FieldContext, prec=None) -> CMPoint:
    """Parse and build "sqrt_theta", "kummer:R" or "quadratic:A,B" (A, B polynomials in theta)."""
    prec = ctx.default_prec if prec is None else prec
    name, _, arg = kind.partition(":")
    if name == "sqrt_theta":
        cm = _kummer(ctx, 2)
    elif name == "kummer":
        cm = _kummer(ctx, int(arg))
    elif name == "quadratic":
        try:
            a_text, b_text = arg.split(",")
        except ValueError as exc:
            raise ValueError(f"quadratic points are written quadratic:A,B, got {kind!r}") from exc
        cm = _quadratic(ctx, parse_poly(ctx, a_text), parse_poly(ctx, b_text), prec)
    else:
        raise ValueError(f"unknown CM point kind {kind!r}")
    if not cm.check_multiplier():
        raise PrecisionError(f"{kind}: multiplier matrix does not reproduce c * basis")
    return cm


# ==================== Values with a certified tail ====================


@dataclass(frozen=True, eq=False)
class LatticeValue:
    """e_Lambda(z) to relative precision *rel*, with the data that bounds it."""

    value: RamifiedSeries
    exp: LatticeExponential
    tail: Fraction  # relative valuation of e_Lambda(z)/e_V(z) - 1
    rel: Fraction

    def to_json(self) -> dict:
        return {
            "degree": self.exp.degree,
            "tail_relative": str(self.tail),
            "next_layer_val": str(self.exp.next_layer_val),
            "relative_precision": str(self.rel),
        }


def _layers_needed(degree: int, tail, previous, rel) -> int | None:
    """Layer count the tail reaches rel at, extrapolating its last step; None when it stalls."""
    if previous is None or tail <= previous:
        return None
    return degree + math.ceil((rel - tail) / (tail - previous))


def lattice_exp_value(lattice: LatticeSpec, z: RamifiedSeries, rel_prec, degree_budget: int,
                      start_degree: int = 1, retries: int = 3) -> LatticeValue:
    """Raise the layer degree until the tail bound reaches relative precision rel_prec.

    degree_budget layers are tried first.  Past it the degree keeps rising
    only while the growth of the tail bound says the target lies within
    MAX_LAYER_DIM layer vectors.

    Raises PoleError when z lies in the truncated lattice and BudgetExceeded
    when the tail cannot reach rel_prec within those limits.
    """
    ctx = lattice.ctx
    lattice = lattice.reduced()
    rel = Fraction(rel_prec)
    work = rel + REL_GUARD
    cap = MAX_LAYER_DIM // lattice.rank
    degree = start_degree
    attempts = 0
    previous = None
    while degree <= cap:
        lexp = lattice_exp_product(lattice, degree, work)
        y = qpoly_eval(lexp.coeffs, z)
        if y.is_zero():
            raise PoleError("argument is a lattice point to precision")
        tail = lexp.tail_exponent(y.valuation)
        if tail < rel:
            _logger.debug("degree %d: tail %s short of %s", degree, tail, rel)
            if degree >= degree_budget:
                needed = _layers_needed(degree, tail, previous, rel)
                if needed is None or needed > cap:
                    raise BudgetExceeded(
                        f"lattice tail reaches {tail} after {degree} layers, short of {rel}"
                    )
                if degree == degree_budget:
                    _logger.info("tail bound needs about %d layers, past the budget of %d",
                                 needed, degree_budget)
            previous = tail
            degree += 1
            continue
        have = y.precision - y.valuation
        if have < rel:
            attempts += 1
            if attempts > retries:
                raise PrecisionError(f"lattice value only reaches relative precision {have}")
            work += rel - have + REL_GUARD
            continue
        return LatticeValue(y.truncate(y.valuation + rel), lexp, tail, rel)
    raise BudgetExceeded(f"lattice tail needs more than {cap} layers")
