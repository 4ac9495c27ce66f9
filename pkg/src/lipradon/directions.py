"""Projection directions on the unit circle.

The twelve multiples of 30 degrees are the special directions
``+-w_k`` and ``+-w_k^perp``; they carry exact Q(sqrt 3) components so
projections of construction points stay exact.  Any other direction is
generic and handled in binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .field import QS3
from .geometry import Point

_H = Fraction(1, 2)
# exact (cos, sin) of m * 30 degrees
_EXACT = [
    (QS3(1), QS3(0)),
    (QS3(0, _H), QS3(_H)),
    (QS3(_H), QS3(0, _H)),
    (QS3(0), QS3(1)),
    (QS3(-_H), QS3(0, _H)),
    (QS3(0, -_H), QS3(_H)),
    (QS3(-1), QS3(0)),
    (QS3(0, -_H), QS3(-_H)),
    (QS3(-_H), QS3(0, -_H)),
    (QS3(0), QS3(-1)),
    (QS3(_H), QS3(0, -_H)),
    (QS3(0, _H), QS3(-_H)),
]


def _special_names() -> dict[int, str]:
    names = {}
    for k in range(3):
        names[(2 * k) % 12] = f"omega{k}"
        names[(2 * k + 6) % 12] = f"-omega{k}"
        # perp = clockwise quarter turn = -3 steps of 30 degrees
        names[(2 * k - 3) % 12] = f"omega{k}perp"
        names[(2 * k + 3) % 12] = f"-omega{k}perp"
    return names


SPECIAL_NAMES = _special_names()
_NAME_TO_INDEX = {v: k for k, v in SPECIAL_NAMES.items()}


@dataclass(frozen=True)
class Direction:
    """A unit vector ``(cos theta, sin theta)``.

    ``index`` is set (0..11) iff theta is an exact multiple of 30 degrees.
    """

    theta: float
    index: int | None = None

    @classmethod
    def special(cls, which: int | str) -> Direction:
        if isinstance(which, str):
            try:
                which = _NAME_TO_INDEX[which]
            except KeyError:
                raise ValueError(f"unknown special direction {which!r}") from None
        m = which % 12
        return cls(m * math.pi / 6, m)

    @classmethod
    def omega(cls, k: int) -> Direction:
        return cls.special(2 * k)

    @classmethod
    def omega_perp(cls, k: int) -> Direction:
        return cls.special(2 * k - 3)

    @classmethod
    def from_angle(cls, theta: float) -> Direction:
        """Generic direction; never snapped to a special one."""
        return cls(float(theta), None)

    @classmethod
    def from_degrees(cls, deg) -> Direction:
        """Exact degrees (int/Fraction) that are multiples of 30 become special."""
        if isinstance(deg, (int, Fraction)):
            q = Fraction(deg) / 30
            if q.denominator == 1:
                return cls.special(int(q))
        return cls(math.radians(float(deg)), None)

    @classmethod
    def parse(cls, text: str) -> Direction:
        """``omega1``, ``-omega0perp``, ``30`` (degrees), ``12.5`` or ``rad:0.3``."""
        text = text.strip()
        if text in _NAME_TO_INDEX:
            return cls.special(text)
        if text.startswith("rad:"):
            return cls.from_angle(float(text[4:]))
        try:
            return cls.from_degrees(Fraction(text))
        except ValueError:
            raise ValueError(f"cannot parse direction {text!r}") from None

    @property
    def is_special(self) -> bool:
        return self.index is not None

    @property
    def is_edge_normal(self) -> bool:
        """True for the six +-w_k^perp, where standard-triangle profiles jump."""
        return self.index is not None and self.index % 2 == 1

    @property
    def name(self) -> str:
        if self.index is not None:
            return SPECIAL_NAMES[self.index]
        return f"rad:{self.theta!r}"

    @property
    def exact(self) -> tuple[QS3, QS3]:
        if self.index is None:
            raise ValueError("generic direction has no exact components")
        return _EXACT[self.index]

    @property
    def vector(self) -> tuple[float, float]:
        if self.index is not None:
            c, s = _EXACT[self.index]
            return (c.to_float(), s.to_float())
        return (math.cos(self.theta), math.sin(self.theta))

    def rotated(self, angle: float) -> Direction:
        return Direction.from_angle(self.theta + angle)

    def rotated120(self, times: int = 1) -> Direction:
        if self.index is not None:
            return Direction.special(self.index + 4 * times)
        return Direction.from_angle(self.theta + times * 2 * math.pi / 3)

    def perp(self) -> Direction:
        if self.index is not None:
            return Direction.special(self.index - 3)
        return Direction.from_angle(self.theta - math.pi / 2)

    def project(self, p: Point):
        """<p, omega>: exact QS3 when special, binary64 otherwise."""
        if self.index is not None:
            c, s = _EXACT[self.index]
            return p.x * c + p.y * s
        c, s = self.vector
        return p.x.to_float() * c + p.y.to_float() * s

    def project_float(self, xy: tuple[float, float]) -> float:
        c, s = self.vector
        return xy[0] * c + xy[1] * s


def project(p: Point, omega: Direction):
    return omega.project(p)


def acute_angle(u: Direction, v: Direction) -> float:
    """Unsigned acute angle in [0, pi/2] between the lines spanned by u and v."""
    d = abs(u.theta - v.theta) % math.pi
    return min(d, math.pi - d)
