from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lipradon.field import QS3, SQRT3
from lipradon.geometry import (
    GeometryError,
    Orientation,
    Point,
    SignedRegion,
    StandardTriangle,
    cell,
    circumscribe,
    feet,
    inner_triangle,
    interiors_disjoint,
    min_sq_dist,
    outer_edge,
    region_area,
    rotate120,
    segment_on_some_edge,
    separated,
    standard_triangle,
)
from oracles import triangle_area_shoelace

small = st.fractions(min_value=-5, max_value=5, max_denominator=50)
sides = st.fractions(min_value=Fraction(1, 50), max_value=5, max_denominator=50)
orients = st.sampled_from([Orientation.UP, Orientation.DOWN])
triangles = st.builds(standard_triangle, small, small, sides, orients)


def test_unit_up_vertices():
    v = standard_triangle(0, 0, 1).vertices
    assert v[0] == Point.of(0, SQRT3 / 3)
    assert v[1] == Point.of(Fraction(1, 2), -SQRT3 / 6)
    assert v[2] == Point.of(Fraction(-1, 2), -SQRT3 / 6)


def test_down_is_point_reflection():
    up = standard_triangle(0, 0, 2).vertices
    down = standard_triangle(0, 0, 2, Orientation.DOWN).vertices
    assert all(d == -u for u, d in zip(up, down))


def test_nonpositive_side_rejected():
    with pytest.raises(ValueError):
        standard_triangle(0, 0, 0)
    with pytest.raises(GeometryError):
        feet(standard_triangle(0, 0, 1), 0)


@given(triangles)
def test_area_and_edges(T):
    assert T.area == SQRT3 * T.side**2 / 4
    assert T.area.to_float() == pytest.approx(triangle_area_shoelace(T.float_vertices), rel=1e-12)
    for a, b in T.edges():
        assert (b - a).norm2() == T.side**2
    # exactly one horizontal edge
    assert sum((a.y - b.y) == 0 for a, b in T.edges()) == 1


@given(triangles, sides)
def test_feet_share_vertices(T, r):
    fs = feet(T, r)
    for k, f in enumerate(fs):
        assert f.side == r
        assert f.orientation is T.orientation.flipped()
        assert f.vertices[k] == T.vertices[k]
        assert interiors_disjoint(f, T)


@given(triangles, sides)
def test_circumscribe_contains_outer_edges(T, r):
    Tn = circumscribe(T, r)
    assert Tn.side == 2 * T.side + 3 * r
    for k, f in enumerate(feet(T, r)):
        assert segment_on_some_edge(outer_edge(f, k), Tn)
        assert Tn.contains(f.centroid)


@given(triangles)
def test_inner_triangle_and_cell(T):
    T0 = inner_triangle(T)
    assert T0.side == T.side * Fraction(2, 7)
    assert T0.orientation is T.orientation.flipped()
    C = cell(T)
    assert len(C) == 5
    assert region_area(C) == T.area * Fraction(6, 7)


def test_cell_indicator():
    T = standard_triangle(0, 0, 1)
    C = cell(T)
    assert C.indicator(T.centroid) == 0
    # a point just inside T near a vertex survives
    v = T.vertices[0]
    p = v + (T.centroid - v) * Fraction(1, 20)
    assert C.indicator(p) == 1
    assert C.indicator(Point.of(5, 5)) == 0


@given(st.builds(Point.of, small, small))
def test_rotate120_order_three(p):
    assert rotate120(rotate120(rotate120(p))) == p
    assert rotate120(p).norm2() == p.norm2()


@given(triangles)
def test_triangle_symmetries(T):
    assert T.rotated120(3) == T
    assert T.reflected_y_axis().reflected_y_axis() == T
    R = SignedRegion.of([T])
    assert region_area(R.rotated120()) == region_area(R)


def test_separation_and_distance():
    A = standard_triangle(0, 0, 1)
    B = A.translated(Point.of(3, 0))
    assert separated(A, B)
    assert interiors_disjoint(A, B)
    assert min_sq_dist(A, B) == 4  # vertex (1/2, .) to vertex (5/2, .)
    C = A.translated(Point.of(1, 0))  # touching at a vertex
    assert not separated(A, C)
    assert interiors_disjoint(A, C)
    assert min_sq_dist(A, C) == 0
    D = A.translated(Point.of(Fraction(1, 2), 0))
    assert not interiors_disjoint(A, D)


def test_distance_vertex_to_edge():
    A = standard_triangle(0, 0, 1)
    # Down triangle directly above: its bottom vertex faces A's apex
    B = standard_triangle(0, 2, 1, Orientation.DOWN)
    gap = B.vertices[0].y - A.vertices[0].y
    assert min_sq_dist(A, B) == gap * gap
    assert min_sq_dist(A, B) == min_sq_dist(B, A)


def test_json_round_trip():
    T = standard_triangle(Fraction(1, 3), QS3(0, 1), Fraction(5, 7), Orientation.DOWN)
    assert StandardTriangle.from_json(T.to_json()) == T
