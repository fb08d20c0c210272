"""Exact arithmetic in a real quadratic field Q(sqrt(d)) and frequency vectors."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


@lru_cache(maxsize=None)
def is_squarefree(d: int) -> bool:
    if d < 1:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


def squarefree_part(n: int) -> tuple[int, int]:
    """Split a positive integer as ``n = s**2 * r`` with ``r`` square-free; return ``(s, r)``."""
    if n <= 0:
        raise ValueError("squarefree_part needs a positive integer")
    s, r = 1, 1
    f = 2
    m = n
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            s *= f
        if m % f == 0:
            m //= f
            r *= f
        f += 1
    return s, r * m


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


class QuadExt:
    """The number ``a + b*sqrt(d)`` with rational ``a, b`` and square-free ``d >= 1``.

    ``d == 1`` denotes plain rationals (``b`` is folded into ``a``).  Values
    with ``b == 0`` are rational and combine with any radicand; two
    irrational values must share ``d``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Rational = 0, b: Rational = 0, d: int = 1):
        a = Fraction(a)
        b = Fraction(b)
        if d == 1:
            a, b = a + b, Fraction(0)
        elif not is_squarefree(d):
            raise ValueError(f"radicand {d} is not square-free")
        self.a = a
        self.b = b
        self.d = d

    @classmethod
    def coerce(cls, x: "QuadExt | Rational") -> "QuadExt":
        if isinstance(x, QuadExt):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadExt")

    @classmethod
    def sqrt_of(cls, n: Rational) -> "QuadExt":
        """sqrt(n) for a positive rational n, expressed in Q(sqrt(r)) with r square-free."""
        n = Fraction(n)
        if n < 0:
            raise ValueError("negative argument")
        if n == 0:
            return cls(0)
        # sqrt(p/q) = sqrt(p*q)/q
        s, r = squarefree_part(n.numerator * n.denominator)
        if r == 1:
            return cls(Fraction(s, n.denominator))
        return cls(0, Fraction(s, n.denominator), r)

    # -- structure ---------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def _radicand_with(self, other: "QuadExt") -> int:
        if self.b and other.b and self.d != other.d:
            raise ValueError(f"radicand mismatch: {self.d} vs {other.d}")
        if self.b:
            return self.d
        if other.b:
            return other.d
        return max(self.d, other.d)

    def with_radicand(self, d: int) -> "QuadExt":
        if self.b and self.d != d:
            raise ValueError(f"radicand mismatch: {self.d} vs {d}")
        return QuadExt(self.a, self.b, d)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, QuadExt):
            return NotImplemented
        if self.b == 0 and other.b == 0:
            return self.a == other.a
        return self.a == other.a and self.b == other.b and self.d == other.d

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __repr__(self) -> str:
        if self.b == 0:
            return f"QuadExt({self.a})"
        return f"QuadExt({self.a}, {self.b}, {self.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        rad = f"√{self.d}"
        if self.b == 1:
            tail = rad
        elif self.b == -1:
            tail = "-" + rad
        else:
            tail = f"{self.b}{rad}"
        if self.a == 0:
            return tail
        sign = "" if tail.startswith("-") else "+"
        return f"{self.a}{sign}{tail}"

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * self.d ** 0.5

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    # -- arithmetic --------------------------------------------------------
    def __neg__(self) -> "QuadExt":
        return QuadExt(-self.a, -self.b, self.d)

    def __add__(self, other: "QuadExt | Rational") -> "QuadExt":
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a + other, self.b, self.d)
        if not isinstance(other, QuadExt):
            return NotImplemented
        d = self._radicand_with(other)
        return QuadExt(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __sub__(self, other: "QuadExt | Rational") -> "QuadExt":
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a - other, self.b, self.d)
        if not isinstance(other, QuadExt):
            return NotImplemented
        d = self._radicand_with(other)
        return QuadExt(self.a - other.a, self.b - other.b, d)

    def __rsub__(self, other: "QuadExt | Rational") -> "QuadExt":
        return (-self) + other

    def __mul__(self, other: "QuadExt | Rational") -> "QuadExt":
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a * other, self.b * other, self.d)
        if not isinstance(other, QuadExt):
            return NotImplemented
        d = self._radicand_with(other)
        a = self.a * other.a + d * self.b * other.b
        b = self.a * other.b + self.b * other.a
        return QuadExt(a, b, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def field_norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadExt":
        n = self.field_norm()
        if n == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other: "QuadExt | Rational") -> "QuadExt":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("QuadExt division by zero")
            return QuadExt(self.a / other, self.b / other, self.d)
        if not isinstance(other, QuadExt):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: "QuadExt | Rational") -> "QuadExt":
        return QuadExt.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "QuadExt":
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadExt(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- order -------------------------------------------------------------
    def sign(self) -> int:
        return qext_sign(self)

    def __lt__(self, other: "QuadExt | Rational") -> bool:
        return qext_sign(self - other) < 0

    def __le__(self, other: "QuadExt | Rational") -> bool:
        return qext_sign(self - other) <= 0

    def __gt__(self, other: "QuadExt | Rational") -> bool:
        return qext_sign(self - other) > 0

    def __ge__(self, other: "QuadExt | Rational") -> bool:
        return qext_sign(self - other) >= 0

    def sqrt(self) -> "QuadExt | None":
        """Square root inside the same field, or None when it does not exist there."""
        if self.sign() < 0:
            return None
        if self.b == 0:
            r = rational_sqrt(self.a)
            if r is not None:
                return QuadExt(r, 0, self.d)
            if self.d > 1:
                # a = t**2 * d  ->  sqrt(a) = t*sqrt(d)
                t = rational_sqrt(self.a / self.d)
                if t is not None:
                    return QuadExt(0, t, self.d)
            return None
        # (x + y sqrt d)^2 = x^2 + d y^2 + 2 x y sqrt d
        disc = rational_sqrt(self.a * self.a - self.d * self.b * self.b)
        if disc is None:
            return None
        for x2 in ((self.a + disc) / 2, (self.a - disc) / 2):
            x = rational_sqrt(x2)
            if x is None or x == 0:
                continue
            y = self.b / (2 * x)
            cand = QuadExt(x, y, self.d)
            if cand.sign() < 0:
                cand = -cand
            if cand * cand == self:
                return cand
        return None


def qext_sign(x: QuadExt) -> int:
    """Sign of ``a + b*sqrt(d)`` (real embedding, ``sqrt(d) > 0``) by rational comparisons."""
    a, b = x.a, x.b
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 d
    lhs = a * a
    rhs = b * b * x.d
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


class Frequency(tuple):
    """An exact frequency vector: a tuple of :class:`QuadExt` coordinates."""

    __slots__ = ()

    def __new__(cls, coords: Iterable["QuadExt | Rational"]):
        return super().__new__(cls, (QuadExt.coerce(c) for c in coords))

    @classmethod
    def zero(cls, n: int) -> "Frequency":
        return cls([0] * n)

    @property
    def dimension(self) -> int:
        return len(self)

    @property
    def radicand(self) -> int:
        for c in self:
            if c.b:
                return c.d
        return 1

    def is_zero(self) -> bool:
        return not any(self)

    def plus(self, other: Sequence[QuadExt]) -> "Frequency":
        return Frequency(x + y for x, y in zip(self, other, strict=True))

    def minus(self, other: Sequence[QuadExt]) -> "Frequency":
        return Frequency(x - y for x, y in zip(self, other, strict=True))

    def scaled(self, t: "QuadExt | Rational") -> "Frequency":
        return Frequency(x * t for x in self)

    def negated(self) -> "Frequency":
        return Frequency(-x for x in self)

    def dot(self, other: Sequence[QuadExt]) -> QuadExt:
        acc = QuadExt(0)
        for x, y in zip(self, other, strict=True):
            acc = acc + x * y
        return acc

    def norm2(self) -> QuadExt:
        return self.dot(self)

    def sort_key(self) -> tuple:
        return tuple((c.a, c.b) for c in self)

    def to_floats(self) -> list[float]:
        return [float(c) for c in self]

    def __repr__(self) -> str:
        return "(" + ", ".join(str(c) for c in self) + ")"


def ray_factor(k: Sequence[QuadExt], v: Sequence[QuadExt]) -> QuadExt | None:
    """Return ``t > 0`` with ``k == t*v`` exactly, or None if ``k`` is not on the open ray of ``v``."""
    t = None
    for kc, vc in zip(k, v, strict=True):
        if not vc:
            if kc:
                return None
            continue
        r = kc / vc
        if t is None:
            t = r
        elif r != t:
            return None
    if t is None or t.sign() <= 0:
        return None
    return t


def det2(u: Sequence[QuadExt], v: Sequence[QuadExt]) -> QuadExt:
    return u[0] * v[1] - u[1] * v[0]


def det3(u: Sequence[QuadExt], v: Sequence[QuadExt], w: Sequence[QuadExt]) -> QuadExt:
    return (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )


def cross3(u: Sequence[QuadExt], v: Sequence[QuadExt]) -> Frequency:
    return Frequency(
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    )


def common_radicand(values: Iterable[QuadExt]) -> int:
    d = 1
    for v in values:
        if v.b:
            if d != 1 and v.d != d:
                raise ValueError(f"radicand mismatch: {d} vs {v.d}")
            d = v.d
    return d
