"""Standard triangles, feet, cells and signed regions.

A standard triangle is an equilateral triangle with one horizontal edge.  It
is stored as (centroid, side, orientation) so that "standard" holds by
construction; vertices are derived on demand in exact Q(sqrt 3) arithmetic.

Vertex order is canonical: vertex ``k`` lies on the axis through the
centroid in direction ``w_k^perp`` (``w_k = (cos k pi/3, sin k pi/3)``,
perp = clockwise quarter turn).  For an Up triangle that is
[apex, bottom-right, bottom-left]; for Down it is
[bottom, top-left, top-right].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .field import ONE, QS3, SQRT3, ZERO, QS3Like


class GeometryError(ValueError):
    pass


class Orientation(enum.Enum):
    UP = "up"
    DOWN = "down"

    def flipped(self) -> Orientation:
        return Orientation.DOWN if self is Orientation.UP else Orientation.UP


@dataclass(frozen=True)
class Point:
    x: QS3
    y: QS3

    @classmethod
    def of(cls, x: QS3Like, y: QS3Like) -> Point:
        return cls(QS3.coerce(x), QS3.coerce(y))

    def __add__(self, other: Point) -> Point:
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point) -> Point:
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, s: QS3Like) -> Point:
        return Point(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> Point:
        return Point(-self.x, -self.y)

    def dot(self, other: Point) -> QS3:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Point) -> QS3:
        return self.x * other.y - self.y * other.x

    def norm2(self) -> QS3:
        return self.dot(self)

    def as_float(self) -> tuple[float, float]:
        return (self.x.to_float(), self.y.to_float())

    def to_json(self) -> list:
        return [self.x.to_json(), self.y.to_json()]

    @classmethod
    def from_json(cls, data) -> Point:
        return cls(QS3.from_json(data[0]), QS3.from_json(data[1]))


ORIGIN = Point(ZERO, ZERO)

# rotation by +2pi/3 about the origin: cos = -1/2, sin = sqrt(3)/2
_COS120 = QS3(Fraction(-1, 2))
_SIN120 = QS3(0, Fraction(1, 2))


def rotate120(p: Point, times: int = 1) -> Point:
    for _ in range(times % 3):
        p = Point(_COS120 * p.x - _SIN120 * p.y, _SIN120 * p.x + _COS120 * p.y)
    return p


def reflect_y_axis(p: Point) -> Point:
    return Point(-p.x, p.y)


@dataclass(frozen=True)
class StandardTriangle:
    centroid: Point
    side: QS3
    orientation: Orientation = Orientation.UP

    def __post_init__(self) -> None:
        if not isinstance(self.side, QS3):
            object.__setattr__(self, "side", QS3.coerce(self.side))
        if self.side.sign() <= 0:
            raise GeometryError("side length must be positive")

    @cached_property
    def vertices(self) -> tuple[Point, Point, Point]:
        return vertices(self)

    @cached_property
    def float_vertices(self) -> tuple[tuple[float, float], ...]:
        return tuple(v.as_float() for v in self.vertices)

    @property
    def area(self) -> QS3:
        return SQRT3 * self.side * self.side / 4

    def translated(self, d: Point) -> StandardTriangle:
        return StandardTriangle(self.centroid + d, self.side, self.orientation)

    def scaled(self, lam: QS3Like) -> StandardTriangle:
        """Image under x -> lam * x; negative lam includes the point reflection."""
        lam = QS3.coerce(lam)
        if lam.sign() < 0:
            return StandardTriangle(self.centroid * lam, -self.side * lam, self.orientation.flipped())
        return StandardTriangle(self.centroid * lam, self.side * lam, self.orientation)

    def rotated120(self, times: int = 1) -> StandardTriangle:
        return StandardTriangle(rotate120(self.centroid, times), self.side, self.orientation)

    def reflected_y_axis(self) -> StandardTriangle:
        return StandardTriangle(reflect_y_axis(self.centroid), self.side, self.orientation)

    def edges(self) -> list[tuple[Point, Point]]:
        v = self.vertices
        return [(v[1], v[2]), (v[2], v[0]), (v[0], v[1])]

    def contains(self, p: Point) -> bool:
        """Closed-triangle membership, exact."""
        return _in_closed_triangle(self.vertices, p)

    def key(self) -> tuple:
        return (self.centroid.x, self.centroid.y, self.side, self.orientation.value)

    def to_json(self) -> dict:
        return {
            "centroid": self.centroid.to_json(),
            "side": self.side.to_json(),
            "orientation": self.orientation.value,
        }

    @classmethod
    def from_json(cls, data: dict) -> StandardTriangle:
        return cls(Point.from_json(data["centroid"]), QS3.from_json(data["side"]),
                   Orientation(data["orientation"]))


def standard_triangle(cx: QS3Like, cy: QS3Like, side: QS3Like,
                      orientation: Orientation | str = Orientation.UP) -> StandardTriangle:
    return StandardTriangle(Point.of(cx, cy), QS3.coerce(side), Orientation(orientation))


def vertices(T: StandardTriangle) -> tuple[Point, Point, Point]:
    """Canonically ordered vertices; Down is the point reflection of Up."""
    c, s = T.centroid, T.side
    half = s * Fraction(1, 2)
    low = SQRT3 * s * Fraction(1, 6)
    high = SQRT3 * s * Fraction(1, 3)
    offsets = (Point(ZERO, high), Point(half, -low), Point(-half, -low))
    if T.orientation is Orientation.DOWN:
        offsets = tuple(-o for o in offsets)
    return (c + offsets[0], c + offsets[1], c + offsets[2])


def opposite_edge(T: StandardTriangle, k: int) -> tuple[Point, Point]:
    v = T.vertices
    return (v[(k + 1) % 3], v[(k + 2) % 3])


def feet(T: StandardTriangle, r: QS3Like) -> tuple[StandardTriangle, StandardTriangle, StandardTriangle]:
    """The three r-feet of T in canonical order k = 0, 1, 2.

    Foot k is the point reflection through vertex k of the corner of T
    scaled by r/side: it shares vertex k with T, has side r and opposite
    orientation.  Its vertex k is the shared vertex, so its outer edge is
    ``opposite_edge(foot, k)``.
    """
    r = QS3.coerce(r)
    if r.sign() <= 0:
        raise GeometryError("foot size must be positive")
    c, s = T.centroid, T.side
    ratio = r / s
    out = []
    for v in T.vertices:
        out.append(StandardTriangle(v + (v - c) * ratio, r, T.orientation.flipped()))
    return tuple(out)


def outer_edge(foot: StandardTriangle, k: int) -> tuple[Point, Point]:
    return opposite_edge(foot, k)


def _collinear(a: Point, b: Point, p: Point) -> bool:
    return (b - a).cross(p - a).sign() == 0


def segment_contains(seg: tuple[Point, Point], p: Point) -> bool:
    a, b = seg
    if not _collinear(a, b, p):
        return False
    d = b - a
    u = (p - a).dot(d)
    return u.sign() >= 0 and (u - d.norm2()).sign() <= 0


def segment_within(inner: tuple[Point, Point], outer: tuple[Point, Point]) -> bool:
    return segment_contains(outer, inner[0]) and segment_contains(outer, inner[1])


def segment_on_some_edge(seg: tuple[Point, Point], T: StandardTriangle) -> bool:
    return any(segment_within(seg, e) for e in T.edges())


def inner_triangle(T: StandardTriangle) -> StandardTriangle:
    """The concentric triangle T^0 of side (2/7) side(T) used to carve Cell(T).

    The orientation (opposite to T) is certified by checking that the outer
    edges of the (side(T^0)/2)-feet of T^0 lie on the edges of T.
    """
    T0 = StandardTriangle(T.centroid, T.side * Fraction(2, 7), T.orientation.flipped())
    for k, foot in enumerate(feet(T0, T0.side * Fraction(1, 2))):
        if not segment_on_some_edge(outer_edge(foot, k), T):
            raise GeometryError("inner triangle fails the outer-edge containment property")
    return T0


def circumscribe(T: StandardTriangle, r: QS3Like) -> StandardTriangle:
    """The standard triangle whose edges contain the outer edges of the r-feet of T."""
    r = QS3.coerce(r)
    if r.sign() <= 0:
        raise GeometryError("foot size must be positive")
    Tn = StandardTriangle(T.centroid, 2 * T.side + 3 * r, T.orientation.flipped())
    for k, foot in enumerate(feet(T, r)):
        if not segment_on_some_edge(outer_edge(foot, k), Tn):
            raise GeometryError("circumscribed triangle does not contain an outer edge")
    return Tn


@dataclass(frozen=True)
class SignedTriangle:
    triangle: StandardTriangle
    weight: int = 1

    def __post_init__(self) -> None:
        if self.weight not in (1, -1):
            raise GeometryError("weight must be +1 or -1")

    def to_json(self) -> dict:
        return {"triangle": self.triangle.to_json(), "weight": self.weight}


@dataclass(frozen=True)
class SignedRegion:
    """Finite signed sum of triangle indicators (inclusion-exclusion form)."""

    terms: tuple[SignedTriangle, ...] = field(default_factory=tuple)

    @classmethod
    def of(cls, items: Iterable[SignedTriangle | tuple[StandardTriangle, int] | StandardTriangle]) -> SignedRegion:
        terms = []
        for it in items:
            if isinstance(it, SignedTriangle):
                terms.append(it)
            elif isinstance(it, StandardTriangle):
                terms.append(SignedTriangle(it, 1))
            else:
                terms.append(SignedTriangle(it[0], it[1]))
        return cls(tuple(terms))

    def __add__(self, other: SignedRegion) -> SignedRegion:
        return SignedRegion(self.terms + other.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def scaled(self, lam: QS3Like) -> SignedRegion:
        return SignedRegion(tuple(SignedTriangle(t.triangle.scaled(lam), t.weight) for t in self.terms))

    def translated(self, d: Point) -> SignedRegion:
        return SignedRegion(tuple(SignedTriangle(t.triangle.translated(d), t.weight) for t in self.terms))

    def rotated120(self, times: int = 1) -> SignedRegion:
        return SignedRegion(tuple(SignedTriangle(t.triangle.rotated120(times), t.weight) for t in self.terms))

    def reflected_y_axis(self) -> SignedRegion:
        return SignedRegion(tuple(SignedTriangle(t.triangle.reflected_y_axis(), t.weight) for t in self.terms))

    def indicator(self, p: Point) -> int:
        return sum(t.weight for t in self.terms if t.triangle.contains(p))

    def indicator_float(self, x: float, y: float) -> int:
        return sum(t.weight for t in self.terms if _in_triangle_float(t.triangle.float_vertices, x, y))

    def multiset_key(self) -> list:
        return sorted((t.triangle.key(), t.weight) for t in self.terms)

    def to_json(self) -> list:
        return [t.to_json() for t in self.terms]


def cell(T: StandardTriangle) -> SignedRegion:
    """Cell(T): T minus T^0 and the three (side(T^0)/2)-feet of T^0 (up to null sets)."""
    T0 = inner_triangle(T)
    holes = feet(T0, T0.side * Fraction(1, 2))
    return SignedRegion.of([(T, 1), (T0, -1)] + [(h, -1) for h in holes])


def region_area(R: SignedRegion) -> QS3:
    total = ZERO
    for t in R.terms:
        total = total + t.triangle.area * t.weight
    return total


def _in_closed_triangle(v: Sequence[Point], p: Point) -> bool:
    signs = [(v[(i + 1) % 3] - v[i]).cross(p - v[i]).sign() for i in range(3)]
    return all(s >= 0 for s in signs) or all(s <= 0 for s in signs)


def _in_triangle_float(v, x: float, y: float) -> bool:
    s = []
    for i in range(3):
        ax, ay = v[i]
        bx, by = v[(i + 1) % 3]
        s.append((bx - ax) * (y - ay) - (by - ay) * (x - ax))
    return (s[0] >= 0 and s[1] >= 0 and s[2] >= 0) or (s[0] <= 0 and s[1] <= 0 and s[2] <= 0)


def _interval(vals: Sequence[QS3]) -> tuple[QS3, QS3]:
    return min(vals), max(vals)


def separated(A: StandardTriangle, B: StandardTriangle) -> bool:
    """True iff the closed triangles are disjoint (strict separating axis)."""
    for T in (A, B):
        for a, b in T.edges():
            e = b - a
            n = Point(e.y, -e.x)
            lo_a, hi_a = _interval([n.dot(v) for v in A.vertices])
            lo_b, hi_b = _interval([n.dot(v) for v in B.vertices])
            if hi_a < lo_b or hi_b < lo_a:
                return True
    return False


def interiors_disjoint(A: StandardTriangle, B: StandardTriangle) -> bool:
    """True iff the open triangles do not meet (touching allowed)."""
    for T in (A, B):
        for a, b in T.edges():
            e = b - a
            n = Point(e.y, -e.x)
            lo_a, hi_a = _interval([n.dot(v) for v in A.vertices])
            lo_b, hi_b = _interval([n.dot(v) for v in B.vertices])
            if hi_a <= lo_b or hi_b <= lo_a:
                return True
    return False


def point_segment_sq_dist(p: Point, a: Point, b: Point) -> QS3:
    d = b - a
    L = d.norm2()
    u = (p - a).dot(d)
    if u.sign() <= 0:
        return (p - a).norm2()
    if (u - L).sign() >= 0:
        return (p - b).norm2()
    # squared distance to the supporting line: cross^2 / |d|^2
    c = d.cross(p - a)
    return c * c / L


def min_sq_dist(A: StandardTriangle, B: StandardTriangle) -> QS3:
    """Exact squared Euclidean distance between two closed standard triangles."""
    if not separated(A, B):
        return ZERO
    best = None
    for P, Q in ((A, B), (B, A)):
        for p in P.vertices:
            for a, b in Q.edges():
                d = point_segment_sq_dist(p, a, b)
                if best is None or d < best:
                    best = d
    return best


def edge_directions(T: StandardTriangle) -> set[tuple[QS3, QS3]]:
    """Unit tangent directions (both signs) of the edges of T."""
    out = set()
    for a, b in T.edges():
        d = (b - a) * (ONE / T.side)
        out.add((d.x, d.y))
        out.add((-d.x, -d.y))
    return out
