"""Exact scalars.

Rationals are the working field.  A few of the classical examples are stated
in bases involving ``1/sqrt(2)``, so a single quadratic surd ``a + b*sqrt(d)``
is also supported.  Surds with different radicands only combine when one side
is rational (sums) or both are pure ``b*sqrt(d)`` (products), which is enough
for Gram matrices of pseudo-orthonormal frames.
"""

from __future__ import annotations

import math
import re
import gmpy2
from functools import lru_cache
from numbers import Rational

from sympy import factorint

Q = gmpy2.mpq

__all__ = [
    "Q",
    "QuadraticSurd",
    "ScalarParseError",
    "as_scalar",
    "format_scalar",
    "is_exact",
    "is_rational",
    "parse_scalar",
    "sign",
    "sqrt_exact",
    "to_float",
]


class ScalarParseError(ValueError):
    pass


_FAST_RATIONAL = (type(Q(0)), int)


def is_rational(x) -> bool:
    if type(x) in _FAST_RATIONAL:
        return True
    return isinstance(x, (Rational, int)) and not isinstance(x, bool)


def is_exact(x) -> bool:
    return is_rational(x) or isinstance(x, QuadraticSurd)


@lru_cache(maxsize=4096)
def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, f) with n == s*s*f and f squarefree."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    if gmpy2.is_square(n):
        return int(gmpy2.isqrt(n)), 1
    s, f = 1, 1
    for prime, e in factorint(n).items():
        s *= prime ** (e // 2)
        if e % 2:
            f *= prime
    return s, f


class QuadraticSurd:
    """The real number ``a + b*sqrt(d)`` with rational a, b and squarefree d > 1."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        s, f = _squarefree_split(int(d))
        if f == 1:
            raise ValueError(f"sqrt({d}) is rational; use a plain rational")
        self.a = Q(a)
        self.b = Q(b) * s
        self.d = f

    @classmethod
    def make(cls, a, b, d: int):
        """Like the constructor but collapse to a rational when possible."""
        b = Q(b)
        if b == 0:
            return Q(a)
        s, f = _squarefree_split(int(d))
        if f == 1:
            return Q(a) + b * s
        return cls(a, b, d)

    # -- coercion -------------------------------------------------------
    def _parts(self, other):
        if isinstance(other, QuadraticSurd):
            return other.a, other.b, other.d
        if is_rational(other):
            return Q(other), Q(0), self.d
        return None

    def _same_field(self, other):
        parts = self._parts(other)
        if parts is None:
            return None
        a, b, d = parts
        if b != 0 and d != self.d:
            raise ValueError(
                f"cannot combine sqrt({self.d}) and sqrt({d}) in one number"
            )
        return a, b

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        parts = self._same_field(other)
        if parts is None:
            return NotImplemented
        return QuadraticSurd.make(self.a + parts[0], self.b + parts[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        parts = self._same_field(other)
        if parts is None:
            return NotImplemented
        return QuadraticSurd.make(self.a - parts[0], self.b - parts[1], self.d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        a, b, d = parts
        if b != 0 and d != self.d:
            if self.a != 0 or a != 0:
                raise ValueError(
                    f"cannot multiply non-pure surds over sqrt({self.d}) and sqrt({d})"
                )
            g = math.gcd(self.d, d)
            return QuadraticSurd.make(0, self.b * b * g, (self.d // g) * (d // g))
        return QuadraticSurd.make(
            self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d
        )

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.b * self.b * self.d
        return QuadraticSurd.make(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        if is_rational(other):
            return QuadraticSurd.make(self.a / other, self.b / other, self.d)
        if isinstance(other, QuadraticSurd):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if is_rational(other):
            return self.inverse() * other
        return NotImplemented

    # -- comparison -----------------------------------------------------
    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 d
        lhs, rhs = self.a * self.a, self.b * self.b * self.d
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def __eq__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        a, b, d = parts
        if b == 0:
            return self.b == 0 and self.a == a
        return (self.a, self.b, self.d) == (a, b, d)

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self):
        return True  # b != 0 by construction

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadraticSurd({self.a!s}, {self.b!s}, {self.d})"

    def __str__(self):
        return format_scalar(self)


def sign(x) -> int:
    if isinstance(x, QuadraticSurd):
        return x.sign()
    return (x > 0) - (x < 0)


def sqrt_exact(q):
    """Exact square root of a nonnegative rational, as a rational or a pure surd."""
    q = Q(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    if q == 0:
        return Q(0)
    n, d = q.numerator, q.denominator
    s, f = _squarefree_split(n * d)
    return QuadraticSurd.make(0, Q(s, d), f) if f != 1 else Q(s, d)


def to_float(x) -> float:
    return float(x)


_RAT = r"[-+]?\d+(?:/\d+)?(?:\.\d*)?(?:[eE][-+]?\d+)?"
_SURD_RE = re.compile(
    rf"^\s*(?:(?P<a>{_RAT})\s*(?P<op>[-+])\s*)?"
    rf"(?:(?P<b>{_RAT})\s*\*\s*|(?P<bsign>[-+])?)sqrt\((?P<d>\d+)\)"
    rf"(?:\s*/\s*(?P<den>\d+))?\s*$"
)


def parse_scalar(text):
    """Parse ``"p/q"``, decimals, ints, or ``"a + b*sqrt(d)"`` into an exact scalar."""
    if isinstance(text, bool):
        raise ScalarParseError(f"not a scalar: {text!r}")
    if is_rational(text):
        return Q(text)
    if isinstance(text, float):
        # decimal literal semantics, not binary expansion
        return Q(repr(text))
    if isinstance(text, QuadraticSurd):
        return text
    if not isinstance(text, str):
        raise ScalarParseError(f"not a scalar: {text!r}")
    s = text.strip()
    try:
        return Q(s)
    except (ValueError, ZeroDivisionError):
        pass
    m = _SURD_RE.match(s)
    if not m:
        raise ScalarParseError(f"cannot parse scalar {text!r}")
    a = Q(m["a"]) if m["a"] else Q(0)
    if m["b"]:
        b = Q(m["b"])
    else:
        b = Q(-1) if m["bsign"] == "-" else Q(1)
    if m["op"] == "-":
        b = -b
    if m["den"]:
        b /= int(m["den"])
    return QuadraticSurd.make(a, b, int(m["d"]))


def as_scalar(x):
    return parse_scalar(x)


def format_scalar(x) -> str:
    """Canonical text form; round-trips through :func:`parse_scalar`."""
    if isinstance(x, QuadraticSurd):
        def term(c):
            return f"sqrt({x.d})" if c == 1 else f"{c}*sqrt({x.d})"

        if x.a == 0:
            return term(x.b) if x.b != -1 else f"-sqrt({x.d})"
        if x.b < 0:
            return f"{x.a} - {term(-x.b)}"
        return f"{x.a} + {term(x.b)}"
    if is_rational(x):
        return str(Q(x))
    return repr(float(x))
