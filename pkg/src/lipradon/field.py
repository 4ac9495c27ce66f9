"""Exact arithmetic in the quadratic field Q(sqrt 3).

Every coordinate, side length, area and special-direction projection that
appears in the triangle construction lives in this field, so all geometric
predicates downstream can be decided without rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Rat = Fraction

_SQRT3_F = math.sqrt(3.0)


def _rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact rational")


class QS3:
    """The number ``a + b*sqrt(3)`` with rational ``a`` and ``b``.

    Instances are immutable and hashable.  Comparison operators are exact.
    """

    __slots__ = ("_a", "_b", "_hash")

    def __init__(self, a=0, b=0) -> None:
        self._a = _rat(a)
        self._b = _rat(b)
        self._hash = None

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @classmethod
    def coerce(cls, x: "QS3Like") -> "QS3":
        if isinstance(x, QS3):
            return x
        return cls(_rat(x), 0)

    def __repr__(self) -> str:
        return f"QS3({self._a}, {self._b})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        if self._a == 0:
            return f"{self._b}*√3"
        sign = "+" if self._b > 0 else "-"
        return f"{self._a} {sign} {abs(self._b)}*√3"

    def __hash__(self) -> int:
        if self._hash is None:
            # agree with hash(int/Fraction) for rational values
            self._hash = hash(self._a) if self._b == 0 else hash((self._a, self._b))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, QS3):
            return self._a == other._a and self._b == other._b
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and self._a == other
        return NotImplemented

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __neg__(self) -> QS3:
        return QS3(-self._a, -self._b)

    def __pos__(self) -> QS3:
        return self

    def __abs__(self) -> QS3:
        return -self if self.sign() < 0 else self

    def __add__(self, other) -> QS3:
        if isinstance(other, QS3):
            return QS3(self._a + other._a, self._b + other._b)
        if isinstance(other, (int, Fraction)):
            return QS3(self._a + other, self._b)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other) -> QS3:
        if isinstance(other, QS3):
            return QS3(self._a - other._a, self._b - other._b)
        if isinstance(other, (int, Fraction)):
            return QS3(self._a - other, self._b)
        return NotImplemented

    def __rsub__(self, other) -> QS3:
        if isinstance(other, (int, Fraction)):
            return QS3(other - self._a, -self._b)
        return NotImplemented

    def __mul__(self, other) -> QS3:
        if isinstance(other, QS3):
            a, b, c, d = self._a, self._b, other._a, other._b
            return QS3(a * c + 3 * b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return QS3(self._a * other, self._b * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> QS3:
        return QS3(self._a, -self._b)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 3 b^2`` (the product with the conjugate)."""
        return self._a * self._a - 3 * self._b * self._b

    def inverse(self) -> QS3:
        n = self.norm()
        if n == 0:
            # norm vanishes only at zero because sqrt(3) is irrational
            raise ZeroDivisionError("QS3 division by zero")
        return QS3(self._a / n, -self._b / n)

    def __truediv__(self, other) -> QS3:
        if isinstance(other, QS3):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("QS3 division by zero")
            return QS3(self._a / other, self._b / other)
        return NotImplemented

    def __rtruediv__(self, other) -> QS3:
        if isinstance(other, (int, Fraction)):
            return QS3(other) * self.inverse()
        return NotImplemented

    def __pow__(self, n: int) -> QS3:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self.inverse()) ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(3)``."""
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the term with the larger square wins
        lhs = self._a * self._a
        rhs = 3 * self._b * self._b
        return sa if lhs > rhs else sb

    def _cmp(self, other) -> int:
        if not isinstance(other, QS3):
            if isinstance(other, (int, Fraction)):
                other = QS3(other)
            else:
                return NotImplemented
        return (self - other).sign()

    def __lt__(self, other) -> bool:
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other) -> bool:
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other) -> bool:
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other) -> bool:
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __float__(self) -> float:
        return self.to_float()

    def to_float(self) -> float:
        """Nearest-ish binary64 value, avoiding cancellation.

        When ``a`` and ``b`` have opposite signs the value is evaluated as
        ``(a^2 - 3b^2) / (a - b sqrt 3)`` so both the numerator (exact) and the
        denominator (same-sign sum) are well conditioned.  Raises
        ``OverflowError`` when the magnitude does not fit in binary64.
        """
        a, b = self._a, self._b
        if b == 0:
            return float(a)
        if a == 0 or (a > 0) == (b > 0):
            return float(a) + float(b) * _SQRT3_F
        return float(self.norm()) / (float(a) - float(b) * _SQRT3_F)

    def is_rational(self) -> bool:
        return self._b == 0

    def to_json(self) -> list[int]:
        return [self._a.numerator, self._a.denominator, self._b.numerator, self._b.denominator]

    @classmethod
    def from_json(cls, data) -> QS3:
        an, ad, bn, bd = (int(v) for v in data)
        return cls(Fraction(an, ad), Fraction(bn, bd))


QS3Like = Union[QS3, int, Fraction]

ZERO = QS3(0, 0)
ONE = QS3(1, 0)
SQRT3 = QS3(0, 1)


def qs3(a=0, b=0) -> QS3:
    return QS3(a, b)


def qs3_arith(x: QS3Like, y: QS3Like, op: str) -> QS3:
    """Field operation by name: ``add``, ``sub``, ``mul`` or ``div``."""
    x, y = QS3.coerce(x), QS3.coerce(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown op {op!r}")


def qs3_sign(x: QS3Like) -> int:
    return QS3.coerce(x).sign()


def qs3_to_float(x: QS3Like) -> float:
    return QS3.coerce(x).to_float()
