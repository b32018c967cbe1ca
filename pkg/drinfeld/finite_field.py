"""F_q inside F_{q^s}: table-driven arithmetic on small finite fields.

Elements are plain ints 0..Q-1 whose base-p digits are the coordinates in the
polynomial basis 1, x, ..., x^(n-1) of F_p[x]/(f).  The modulus f is the first
primitive polynomial in lexicographic order, so x generates the multiplicative
group and the log/antilog tables come out of the search for free.

Series code works on whole digit arrays (numpy, shape (L, n)); the helpers at
the bottom of FieldContext do the vectorized part.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from drinfeld.errors import FieldUnsupported

_logger = logging.getLogger(__name__)

MAX_FIELD_ORDER = 1 << 16
DEFAULT_PREC = 64

# Above this order a full addition table costs more memory than it saves.
_ADD_TABLE_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldParams:
    """p, e (q = p^e), residue degree s and ramification index m."""

    p: int
    e: int = 1
    s: int = 1
    m: int = 1

    @property
    def q(self) -> int:
        return self.p ** self.e

    @property
    def degree(self) -> int:
        """[F_{q^s} : F_p]."""
        return self.e * self.s

    @property
    def order(self) -> int:
        return self.p ** self.degree

    def validate(self) -> None:
        if not is_prime(self.p):
            raise FieldUnsupported(f"p={self.p} is not prime")
        for name in ("e", "s", "m"):
            value = getattr(self, name)
            if value < 1:
                raise FieldUnsupported(f"{name} must be at least 1, got {value}")
        if self.order > MAX_FIELD_ORDER:
            raise FieldUnsupported(
                f"F_{{q^s}} has {self.order} elements; tables stop at {MAX_FIELD_ORDER}"
            )


def _powers_of_x(p: int, n: int, low: list[int]) -> list[int] | None:
    """Antilog table of x modulo x^n + sum(low[i] x^i), or None if x is not primitive."""
    order = p ** n
    weights = [p ** i for i in range(n)]
    cur = [1] + [0] * (n - 1)
    out = [1]
    for k in range(1, order):
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [(c - top * f) % p for c, f in zip(cur, low)]
        value = sum(c * w for c, w in zip(cur, weights))
        if k == order - 1:
            return out if value == 1 else None
        if value == 1:
            return None
        out.append(value)
    return out


@lru_cache(maxsize=None)
def _primitive_tables(p: int, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    for code in range(p ** n):
        low = [(code // p ** i) % p for i in range(n)]
        if low[0] == 0:
            continue
        antilog = _powers_of_x(p, n, low)
        if antilog is not None:
            _logger.debug("F_%s^%s modulus low coefficients %s", p, n, low)
            return tuple(low), tuple(antilog)
    raise FieldUnsupported(f"no primitive polynomial of degree {n} over F_{p}")


class FieldContext:
    """Fixed arithmetic data for one (p, e, s, m).

    Contexts compare equal when their FieldParams do; *default_prec* is only
    the cap (in theta-units) used when an exact series has to be inverted.
    """

    def __init__(self, params: FieldParams, default_prec: int = DEFAULT_PREC):
        params.validate()
        self.params = params
        self.p = params.p
        self.e = params.e
        self.s = params.s
        self.m = params.m
        self.q = params.q
        self.n = params.degree
        self.order = params.order
        self.default_prec = default_prec

        low, antilog = _primitive_tables(self.p, self.n)
        self.modulus = low + (1,)
        cycle = self.order - 1
        self._exp = np.array(antilog + antilog, dtype=np.int64)
        self._log = np.full(self.order, -1, dtype=np.int64)
        self._log[np.array(antilog, dtype=np.int64)] = np.arange(cycle, dtype=np.int64)
        self._cycle = cycle

        self.weights = self.p ** np.arange(self.n, dtype=np.int64)
        self.digits = (np.arange(self.order, dtype=np.int64)[:, None] // self.weights) % self.p
        self.reduce_matrix = self.digits[
            [antilog[d % cycle] for d in range(2 * self.n - 1)]
        ]
        self._add = None
        if self.p != 2 and self.order <= _ADD_TABLE_LIMIT:
            summed = (self.digits[:, None, :] + self.digits[None, :, :]) % self.p
            self._add = summed @ self.weights
        self._frob_cache: dict[int, np.ndarray] = {}
        self._mul_cache: dict[int, np.ndarray] = {}
        self._fq_basis: list[int] | None = None
        self.minus_one = self.p - 1
        self.zeta = self.root(self.minus_one, self.q - 1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldContext) and other.params == self.params

    def __hash__(self) -> int:
        return hash(self.params)

    def __repr__(self) -> str:
        p = self.params
        return f"FieldContext(p={p.p}, e={p.e}, s={p.s}, m={p.m})"

    # ---- scalar arithmetic ------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._add is not None:
            return int(self._add[a, b])
        return int(((self.digits[a] + self.digits[b]) % self.p) @ self.weights)

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        return int(((-self.digits[a]) % self.p) @ self.weights)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_{q^s}")
        return int(self._exp[(self._cycle - self._log[a]) % self._cycle])

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of 0")
            return 1 if k == 0 else 0
        return int(self._exp[(int(self._log[a]) * k) % self._cycle])

    def frob(self, a: int, k: int = 1) -> int:
        """a^(q^k); k may be negative."""
        return self.pow(a, pow(self.q, k % self.s))

    def element(self, c: int) -> int:
        """Image of the integer c in the prime field."""
        return c % self.p

    def log(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of 0")
        return int(self._log[a])

    def generator_power(self, k: int) -> int:
        return int(self._exp[k % self._cycle])

    def root(self, c: int, k: int) -> int | None:
        """Least a (as an int) with a^k = c, or None.

        With a = g^x this is k x = log c mod Q - 1, solvable iff
        gcd(k, Q - 1) divides log c; the gcd solutions are spaced (Q - 1)/gcd apart.
        """
        if k < 1:
            raise ValueError(f"root index must be positive, got {k}")
        if c == 0:
            return 0
        d = math.gcd(k, self._cycle)
        target = self.log(c)
        if target % d:
            return None
        step = self._cycle // d
        x0 = (target // d) * pow(k // d, -1, step) % step if step > 1 else 0
        return min(self.generator_power(x0 + t * step) for t in range(d))

    def in_fq(self, a: int) -> bool:
        if a == 0:
            return True
        return self.log(a) % (self._cycle // (self.q - 1)) == 0

    def fq_elements(self) -> list[int]:
        """Elements of the subfield F_q, sorted as ints."""
        step = self._cycle // (self.q - 1)
        return sorted([0] + [self.generator_power(j * step) for j in range(self.q - 1)])

    def fq_basis(self) -> list[int]:
        """F_p-basis of F_q, chosen greedily from fq_elements()."""
        if self._fq_basis is not None:
            return list(self._fq_basis)
        basis: list[int] = []
        rows: list[np.ndarray] = []
        for a in self.fq_elements():
            if a == 0:
                continue
            candidate = rows + [self.digits[a]]
            if _rank_mod_p(np.array(candidate), self.p) == len(candidate):
                basis.append(a)
                rows = candidate
            if len(basis) == self.e:
                break
        self._fq_basis = basis
        return list(basis)

    def has_carlitz_root(self) -> bool:
        """Whether (-theta)^(1/(q-1)) lives in F_{q^s}((theta^(-1/m)))."""
        return self.zeta is not None and self.m % (self.q - 1) == 0

    def describe(self) -> dict:
        return {
            "p": self.p,
            "e": self.e,
            "s": self.s,
            "m": self.m,
            "q": self.q,
            "modulus": list(self.modulus),
            "zeta": self.zeta,
        }

    # ---- digit-array helpers ---------------------------------------------

    def to_digits(self, values) -> np.ndarray:
        return self.digits[np.asarray(values, dtype=np.int64)]

    def from_digits(self, arr: np.ndarray) -> np.ndarray:
        return np.asarray(arr, dtype=np.int64) @ self.weights

    def frobenius_matrix(self, j: int) -> np.ndarray:
        """F_p-matrix of a -> a^(p^j) acting on row digit vectors."""
        j %= self.n
        mat = self._frob_cache.get(j)
        if mat is None:
            exponent = self.p ** j
            mat = self.digits[[self.pow(self.generator_power(i), exponent) for i in range(self.n)]]
            self._frob_cache[j] = mat
        return mat

    def frobenius_digits(self, arr: np.ndarray, k: int) -> np.ndarray:
        """Raise every row of *arr* to the q^k-th power."""
        j = (self.e * k) % self.n
        if j == 0:
            return arr.copy()
        return (arr @ self.frobenius_matrix(j)) % self.p

    def p_root_digits(self, arr: np.ndarray) -> np.ndarray:
        """Inverse of the absolute Frobenius a -> a^p, row-wise."""
        j = (self.n - 1) % self.n
        if j == 0:
            return arr.copy()
        return (arr @ self.frobenius_matrix(j)) % self.p

    def mul_matrix(self, c: int) -> np.ndarray:
        mat = self._mul_cache.get(c)
        if mat is None:
            mat = self.digits[[self.mul(self.generator_power(i), c) for i in range(self.n)]]
            self._mul_cache[c] = mat
        return mat

    def scale_digits(self, arr: np.ndarray, c: int) -> np.ndarray:
        return (arr @ self.mul_matrix(c)) % self.p


def _rank_mod_p(rows: np.ndarray, p: int) -> int:
    from drinfeld.linalg import rank_mod_p

    return rank_mod_p(rows, p)


def field_make(params: FieldParams, prec: int = DEFAULT_PREC) -> FieldContext:
    """Build a context; logs whether the Carlitz root is available."""
    ctx = FieldContext(params, default_prec=prec)
    if ctx.zeta is None:
        _logger.info("no (q-1)-st root of -1 in F_%s; Carlitz period unavailable", ctx.order)
    return ctx
