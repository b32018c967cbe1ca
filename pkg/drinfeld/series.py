"""Truncated elements of F_{q^s}((theta^(-1/m))), our stand-in for C_infinity.

Write T = theta^(-1/m).  A RamifiedSeries stores

    start   exponent of T carried by coeffs[0]
    coeffs  numpy array (L, n) of F_p digits, one row per power of T
    prec    absolute precision in T-units: rows at exponents >= prec are
            unknown; math.inf marks an exact (finite) element

Rows between start+L and prec are known zeros.  Valuations are reported in
theta-units as Fractions (|x| = q^(-valuation)).

Precision follows the usual ultrametric rule: a product is known up to
min(prec_a + v_b, prec_b + v_a).  q-power Frobenius is exact in
characteristic p, so (x + O(T^N))^(q^k) = x^(q^k) + O(T^(N q^k)).
"""

from __future__ import annotations

import logging
import math
import re
from fractions import Fraction

import numpy as np

from drinfeld.errors import FieldUnsupported, PrecisionError
from drinfeld.finite_field import FieldContext

_logger = logging.getLogger(__name__)

INF = math.inf

_FFT_MIN = 2048
_FFT_EXACT_LIMIT = 1 << 40


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def to_T(ctx: FieldContext, prec) -> int | float:
    """Theta-unit precision -> T-units (rounded up)."""
    if prec == INF:
        return INF
    return math.ceil(Fraction(prec) * ctx.m)


def _int_convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    size = len(x) + len(y) - 1
    bound = int(x.max(initial=0)) * int(y.max(initial=0)) * min(len(x), len(y))
    if size < _FFT_MIN or min(len(x), len(y)) < 64 or bound >= _FFT_EXACT_LIMIT:
        return np.convolve(x, y)
    nfft = 1 << (size - 1).bit_length()
    fx = np.fft.rfft(x.astype(np.float64), nfft)
    fy = np.fft.rfft(y.astype(np.float64), nfft)
    out = np.fft.irfft(fx * fy, nfft)[:size]
    return np.rint(out).astype(np.int64)


def convolve_digits(ctx: FieldContext, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two digit-row polynomials over F_{q^s}, shape (La+Lb-1, n).

    Kronecker substitution: row i of *a* becomes the digit block
    [i*S, i*S + n) with S = 2n - 1, which is wide enough that digit products
    never spill into the next block.  One integer convolution, then each block
    is reduced modulo the field modulus with ctx.reduce_matrix.
    """
    p, n = ctx.p, ctx.n
    la, lb = len(a), len(b)
    if n == 1:
        return (_int_convolve(a[:, 0], b[:, 0]) % p)[:, None]
    width = 2 * n - 1
    fa = np.zeros((la, width), dtype=np.int64)
    fa[:, :n] = a
    fb = np.zeros((lb, width), dtype=np.int64)
    fb[:, :n] = b
    flat = _int_convolve(fa.ravel(), fb.ravel())
    blocks = np.zeros((la + lb) * width, dtype=np.int64)
    blocks[: len(flat)] = flat
    blocks = blocks.reshape(la + lb, width)[: la + lb - 1] % p
    return (blocks @ ctx.reduce_matrix) % p


def _mul_trunc(ctx: FieldContext, a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((k, ctx.n), dtype=np.int64)
    prod = convolve_digits(ctx, a[:k], b[:k])[:k]
    out[: len(prod)] = prod
    return out


class RamifiedSeries:
    __slots__ = ("ctx", "start", "coeffs", "prec")

    def __init__(self, ctx: FieldContext, start: int, coeffs, prec=INF):
        arr = np.asarray(coeffs, dtype=np.int64).reshape(-1, ctx.n)
        if prec != INF:
            prec = int(prec)
            arr = arr[: max(0, min(len(arr), prec - start))]
        nonzero = np.nonzero(arr.any(axis=1))[0]
        if nonzero.size == 0:
            arr = arr[:0]
            start = prec if prec != INF else 0
        else:
            first, last = int(nonzero[0]), int(nonzero[-1])
            arr = arr[first : last + 1]
            start = start + first
        self.ctx = ctx
        self.start = int(start) if start != INF else start
        self.coeffs = arr
        self.prec = prec

    # ---- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldContext, prec=INF) -> "RamifiedSeries":
        return cls(ctx, 0, np.zeros((0, ctx.n), dtype=np.int64), prec)

    @classmethod
    def monomial(cls, ctx: FieldContext, c: int, exp_T: int, prec=INF) -> "RamifiedSeries":
        """c * T^exp_T."""
        return cls(ctx, exp_T, ctx.digits[[c]], prec)

    @classmethod
    def constant(cls, ctx: FieldContext, c: int, prec=INF) -> "RamifiedSeries":
        return cls.monomial(ctx, c, 0, prec)

    @classmethod
    def one(cls, ctx: FieldContext) -> "RamifiedSeries":
        return cls.constant(ctx, 1)

    @classmethod
    def theta_power(cls, ctx: FieldContext, exponent, prec_T=INF, c: int = 1) -> "RamifiedSeries":
        """c * theta^exponent for a rational exponent with denominator dividing m."""
        scaled = Fraction(exponent) * ctx.m
        if scaled.denominator != 1:
            raise FieldUnsupported(f"theta^{exponent} needs m divisible by {Fraction(exponent).denominator}")
        return cls.monomial(ctx, c, -int(scaled), prec_T)

    @classmethod
    def from_ints(cls, ctx: FieldContext, start: int, values, prec=INF) -> "RamifiedSeries":
        return cls(ctx, start, ctx.to_digits(list(values)), prec)

    # ---- inspection -------------------------------------------------------

    @property
    def m(self) -> int:
        return self.ctx.m

    def is_exact(self) -> bool:
        return self.prec == INF

    def is_zero(self) -> bool:
        """Numerically zero: every known coefficient vanishes."""
        return len(self.coeffs) == 0

    @property
    def val_T(self):
        return self.start if len(self.coeffs) else self.prec

    @property
    def valuation(self) -> Fraction | None:
        if self.is_zero():
            return None
        return Fraction(self.start, self.m)

    @property
    def precision(self):
        return INF if self.prec == INF else Fraction(self.prec, self.m)

    def val_bound(self):
        """Valuation, or the precision when the value is numerically zero."""
        if not self.is_zero():
            return Fraction(self.start, self.m)
        return self.precision

    def abs_exponent(self) -> Fraction | None:
        """log_q |x|."""
        v = self.valuation
        return None if v is None else -v

    def leading(self) -> int:
        if self.is_zero():
            raise PrecisionError("leading coefficient of a numerically zero series")
        return int(self.coeffs[0] @ self.ctx.weights)

    def coefficient(self, exp_T: int) -> int:
        """Coefficient of T^exp_T (0 when outside the stored rows)."""
        if self.prec != INF and exp_T >= self.prec:
            raise PrecisionError(f"coefficient of T^{exp_T} is beyond precision {self.prec}")
        i = exp_T - self.start
        if i < 0 or i >= len(self.coeffs):
            return 0
        return int(self.coeffs[i] @ self.ctx.weights)

    def terms(self) -> list[tuple[int, int]]:
        """Nonzero (exp_T, coefficient) pairs."""
        values = self.ctx.from_digits(self.coeffs)
        return [(self.start + i, int(c)) for i, c in enumerate(values) if c]

    def digits_window(self, lo_T: int, hi_T: int) -> np.ndarray:
        """Digit rows for exponents lo_T..hi_T-1, zero-filled."""
        out = np.zeros((max(0, hi_T - lo_T), self.ctx.n), dtype=np.int64)
        if self.is_zero() or hi_T <= lo_T:
            return out
        a = max(lo_T, self.start)
        b = min(hi_T, self.start + len(self.coeffs))
        if a < b:
            out[a - lo_T : b - lo_T] = self.coeffs[a - self.start : b - self.start]
        return out

    # ---- precision management ---------------------------------------------

    def truncate_T(self, prec_T) -> "RamifiedSeries":
        if prec_T is None or prec_T == INF or prec_T >= self.prec:
            return self
        return RamifiedSeries(self.ctx, self.start, self.coeffs, prec_T)

    def truncate(self, prec) -> "RamifiedSeries":
        """Lower the absolute precision to *prec* (theta-units)."""
        return self.truncate_T(to_T(self.ctx, prec))

    def with_relative_T(self, rel_T: int) -> "RamifiedSeries":
        if self.is_zero():
            return self
        return self.truncate_T(self.start + rel_T)

    def as_exact(self) -> "RamifiedSeries":
        return RamifiedSeries(self.ctx, self.start, self.coeffs, INF)

    # ---- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "RamifiedSeries":
        if isinstance(other, RamifiedSeries):
            if other.ctx != self.ctx:
                raise ValueError("series from different field contexts")
            return other
        if isinstance(other, int):
            return RamifiedSeries.constant(self.ctx, self.ctx.element(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        prec = min(self.prec, other.prec)
        parts = [s for s in (self, other) if not s.is_zero()]
        if not parts:
            return RamifiedSeries.zero(ctx, prec)
        lo = min(s.start for s in parts)
        hi = max(s.start + len(s.coeffs) for s in parts)
        if prec != INF:
            hi = min(hi, prec)
        if hi <= lo:
            return RamifiedSeries.zero(ctx, prec)
        acc = np.zeros((hi - lo, ctx.n), dtype=np.int64)
        for s in parts:
            rows = s.coeffs[: max(0, hi - s.start)]
            acc[s.start - lo : s.start - lo + len(rows)] += rows
        return RamifiedSeries(ctx, lo, acc % ctx.p, prec)

    __radd__ = __add__

    def __neg__(self) -> "RamifiedSeries":
        return RamifiedSeries(self.ctx, self.start, (-self.coeffs) % self.ctx.p, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        if (self.is_zero() and self.is_exact()) or (other.is_zero() and other.is_exact()):
            return RamifiedSeries.zero(ctx)
        va, vb = self.val_T, other.val_T
        prec = min(self.prec + vb, other.prec + va)
        if self.is_zero() or other.is_zero():
            return RamifiedSeries.zero(ctx, prec)
        a, b = self.coeffs, other.coeffs
        if prec != INF:
            a = a[: max(0, prec - vb - self.start)]
            b = b[: max(0, prec - va - other.start)]
            if len(a) == 0 or len(b) == 0:
                return RamifiedSeries.zero(ctx, prec)
        return RamifiedSeries(ctx, self.start + other.start, convolve_digits(ctx, a, b), prec)

    __rmul__ = __mul__

    def scale(self, c: int) -> "RamifiedSeries":
        """Multiply by the F_{q^s} scalar c."""
        if c == 0:
            return RamifiedSeries.zero(self.ctx)
        if c == 1 or self.is_zero():
            return self
        return RamifiedSeries(self.ctx, self.start, self.ctx.scale_digits(self.coeffs, c), self.prec)

    def shift_T(self, k: int) -> "RamifiedSeries":
        """Multiply by T^k."""
        prec = self.prec if self.prec == INF else self.prec + k
        return RamifiedSeries(self.ctx, self.start + k if len(self.coeffs) else 0, self.coeffs, prec)

    def mul_theta_power(self, i) -> "RamifiedSeries":
        scaled = Fraction(i) * self.m
        if scaled.denominator != 1:
            raise FieldUnsupported(f"theta^{i} is not in the configured field")
        return self.shift_T(-int(scaled))

    def inverse(self, prec=None) -> "RamifiedSeries":
        """1/x.  *prec* (theta-units) caps the result; exact inputs need a cap
        and fall back to ctx.default_prec."""
        ctx = self.ctx
        if self.is_zero():
            raise PrecisionError("cannot invert a series that is zero to its precision")
        v = self.start
        if self.prec == INF and len(self.coeffs) == 1:
            return RamifiedSeries.monomial(ctx, ctx.inv(self.leading()), -v)
        if self.prec == INF:
            target = to_T(ctx, ctx.default_prec if prec is None else prec)
        else:
            target = self.prec - 2 * v
            if prec is not None:
                target = min(target, to_T(ctx, prec))
        rel = target + v
        if self.prec != INF:
            rel = min(rel, self.prec - v)
        if rel <= 0:
            return RamifiedSeries.zero(ctx, target)
        c0inv = ctx.inv(self.leading())
        unit = ctx.scale_digits(self.coeffs[:rel], c0inv)
        y = _inverse_unit(ctx, unit, rel)
        return RamifiedSeries(ctx, -v, ctx.scale_digits(y, c0inv), -v + rel)

    def div(self, other: "RamifiedSeries", prec=None) -> "RamifiedSeries":
        other = self._coerce(other)
        if prec is not None and other.is_exact() and not other.is_zero():
            # cap 1/other so that the quotient, not the inverse, hits prec
            va = self.val_bound()
            shift = 0 if va == INF or va is None else va
            return self * other.inverse(Fraction(prec) - shift)
        return self * other.inverse()

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.div(other)

    def __pow__(self, k: int) -> "RamifiedSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = RamifiedSeries.one(self.ctx)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius_power(self, k: int, prec_T=None) -> "RamifiedSeries":
        """x^(q^k).  For k < 0 this is the q^|k|-th root, which exists in the
        field only when every exponent is divisible by q^|k|.

        *prec_T* caps the absolute precision of the result (T-units); use it,
        the stretched series is otherwise q^k times longer.
        """
        ctx = self.ctx
        if k == 0:
            return self.truncate_T(prec_T)
        if k > 0:
            step = ctx.q ** k
            new_prec = self.prec * step if self.prec != INF else INF
            if prec_T is not None:
                new_prec = min(new_prec, prec_T)
            if self.is_zero():
                return RamifiedSeries.zero(ctx, new_prec)
            new_start = self.start * step
            rows = self.coeffs
            if new_prec != INF:
                rows = rows[: max(0, _ceil_div(new_prec - new_start, step))]
            if len(rows) == 0:
                return RamifiedSeries.zero(ctx, new_prec)
            arr = np.zeros(((len(rows) - 1) * step + 1, ctx.n), dtype=np.int64)
            arr[::step] = ctx.frobenius_digits(rows, k)
            return RamifiedSeries(ctx, new_start, arr, new_prec)
        step = ctx.q ** (-k)
        new_prec = INF if self.prec == INF else _ceil_div(self.prec, step)
        if prec_T is not None:
            new_prec = min(new_prec, prec_T)
        if self.is_zero():
            return RamifiedSeries.zero(ctx, new_prec)
        offsets = np.nonzero(self.coeffs.any(axis=1))[0] + self.start
        if np.any(offsets % step):
            raise FieldUnsupported(f"q^{-k}-th root of this series is not in the configured field")
        rows = self.coeffs[::step]
        return RamifiedSeries(ctx, self.start // step, ctx.frobenius_digits(rows, k), new_prec)

    def p_root(self) -> "RamifiedSeries":
        """Inverse of x -> x^p (characteristic-p square root when p = 2)."""
        ctx = self.ctx
        step = ctx.p
        new_prec = INF if self.prec == INF else _ceil_div(self.prec, step)
        if self.is_zero():
            return RamifiedSeries.zero(ctx, new_prec)
        offsets = np.nonzero(self.coeffs.any(axis=1))[0] + self.start
        if np.any(offsets % step):
            raise FieldUnsupported("p-th root of this series is not in the configured field")
        rows = self.coeffs[::step]
        return RamifiedSeries(ctx, self.start // step, ctx.p_root_digits(rows), new_prec)

    def nth_root(self, k: int, prec=None) -> "RamifiedSeries":
        """Some k-th root, normalized by the least root of the leading coefficient.

        k must be prime to p, or equal to p (then the inseparable root is taken
        coefficientwise).
        """
        ctx = self.ctx
        if self.is_zero():
            raise PrecisionError("root of a numerically zero series")
        if k == ctx.p:
            return self.p_root()
        if k % ctx.p == 0:
            raise FieldUnsupported(f"{k}-th roots mix separable and inseparable parts")
        v = self.start
        if v % k:
            raise FieldUnsupported(
                f"root of index {k} needs ramification beyond m={ctx.m}"
            )
        c0 = self.leading()
        r0 = ctx.root(c0, k)
        if r0 is None:
            raise FieldUnsupported(f"leading coefficient has no {k}-th root in F_{ctx.order}")
        if self.prec == INF:
            rel = to_T(ctx, ctx.default_prec if prec is None else prec) - v // k
        else:
            rel = self.prec - v
        unit = self.scale(ctx.inv(c0)).shift_T(-v).as_exact()
        # z -> u^(-1/k): z <- z + z (1 - u z^k) / k, converging quadratically
        kinv = ctx.inv(ctx.element(k))
        z = RamifiedSeries.one(ctx)
        known = 1
        while known < rel:
            known = min(2 * known, rel)
            err = (RamifiedSeries.one(ctx) - unit * z ** k).truncate_T(known)
            z = (z + (z * err).scale(kinv)).truncate_T(known).as_exact()
        root = (unit * z ** (k - 1)).truncate_T(rel)
        return root.scale(r0).shift_T(v // k)

    def sqrt(self, prec=None) -> "RamifiedSeries":
        return self.nth_root(2, prec)

    # ---- comparison -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RamifiedSeries):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.prec == other.prec
            and self.val_T == other.val_T
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def agrees_with(self, other: "RamifiedSeries") -> bool:
        """True when the two values coincide below the smaller precision."""
        return (self - other).is_zero()

    def residual_valuation(self, other: "RamifiedSeries"):
        """val(self - other), or the joint precision if they agree to it."""
        return (self - other).val_bound()

    # ---- text / JSON ------------------------------------------------------

    def _hex_width(self) -> int:
        return len(format(self.ctx.order - 1, "x"))

    def to_text(self) -> str:
        width = self._hex_width()
        values = self.ctx.from_digits(self.coeffs)
        packed = "".join(format(int(c), f"0{width}x") for c in values)
        val = "inf" if self.val_T == INF else str(Fraction(self.val_T, self.m))
        prec = "inf" if self.prec == INF else str(Fraction(self.prec, self.m))
        return f"v={val}; prec={prec}; coeffs={packed}"

    @classmethod
    def from_text(cls, ctx: FieldContext, text: str) -> "RamifiedSeries":
        m = re.fullmatch(r"\s*v=([^;]+);\s*prec=([^;]+);\s*coeffs=([0-9a-fA-F]*)\s*", text)
        if not m:
            raise ValueError(f"not a series: {text!r}")
        prec = INF if m.group(2).strip() == "inf" else to_T(ctx, Fraction(m.group(2).strip()))
        packed = m.group(3)
        width = len(format(ctx.order - 1, "x"))
        values = [int(packed[i : i + width], 16) for i in range(0, len(packed), width)]
        if not values:
            return cls.zero(ctx, prec)
        start = to_T(ctx, Fraction(m.group(1).strip()))
        return cls.from_ints(ctx, start, values, prec)

    def to_json(self) -> dict:
        values = [int(c) for c in self.ctx.from_digits(self.coeffs)]
        return {
            "val": "inf" if self.val_T == INF else str(Fraction(self.val_T, self.m)),
            "prec": "inf" if self.prec == INF else str(Fraction(self.prec, self.m)),
            "coeffs": values,
        }

    @classmethod
    def from_json(cls, ctx: FieldContext, data: dict) -> "RamifiedSeries":
        prec = INF if data["prec"] == "inf" else to_T(ctx, Fraction(data["prec"]))
        if not data["coeffs"]:
            return cls.zero(ctx, prec)
        return cls.from_ints(ctx, to_T(ctx, Fraction(data["val"])), data["coeffs"], prec)

    def __repr__(self) -> str:
        if self.is_zero():
            return f"RamifiedSeries(0, prec={self.precision})"
        shown = ", ".join(f"{c}*T^{e}" for e, c in self.terms()[:4])
        return f"RamifiedSeries({shown}{', ...' if len(self.coeffs) > 4 else ''}; prec={self.precision})"


def _inverse_unit(ctx: FieldContext, unit: np.ndarray, rel: int) -> np.ndarray:
    """Inverse of a unit (first row = 1) modulo T^rel, by Newton doubling."""
    one = ctx.digits[1]
    y = np.zeros((1, ctx.n), dtype=np.int64)
    y[0] = one
    known = 1
    while known < rel:
        known = min(2 * known, rel)
        err = (-_mul_trunc(ctx, unit, y, known)) % ctx.p
        err[0] = (err[0] + one) % ctx.p
        step = _mul_trunc(ctx, y, err, known)
        grown = np.zeros((known, ctx.n), dtype=np.int64)
        grown[: len(y)] = y
        y = (grown + step) % ctx.p
    return y[:rel]


def series_sum(ctx: FieldContext, items) -> RamifiedSeries:
    total = RamifiedSeries.zero(ctx)
    for item in items:
        total = total + item
    return total
