from fractions import Fraction

import pytest

from lipradon.construction import (
    all_generation_sides,
    area_limit,
    area_of_E,
    build,
    build_E1,
    catalogue_disjoint,
    foot_side,
    line_intersection_count,
    max_intersection_count,
    spacing_check,
)
from lipradon.directions import Direction
from lipradon.field import QS3, SQRT3
from lipradon.geometry import Orientation, cell, region_area


def test_foot_sides():
    assert foot_side(1) == Fraction(3, 7)
    assert foot_side(2) == Fraction(1, 4)
    assert foot_side(3) == Fraction(3, 28)
    with pytest.raises(ValueError):
        foot_side(0)


def test_generation_sides():
    assert all_generation_sides(4) == [1, Fraction(23, 7), Fraction(205, 28), Fraction(419, 28)]


def test_side_recursion():
    sides = all_generation_sides(10)
    for j in range(1, 10):
        assert sides[j] == 2 * sides[j - 1] + 3 * foot_side(j)


def test_build_rejects_bad_levels():
    with pytest.raises(ValueError):
        build(0)


def test_catalogue_shape():
    E = build(3)
    assert len(E.catalogue) == 1 + 3 * 3
    assert E.tau(0, 2) == E.T1
    assert len(E.family(1)) == 1 + 3
    assert len(E.family("all")) == 10
    # odd generation feet enter whole, even ones as cells (5 terms each)
    assert len(E.region) == 5 + 3 * 1 + 3 * 5 + 3 * 1


def test_area_series():
    # geometric series over generations, summed by hand
    assert area_limit() == SQRT3 * Fraction(99, 245)
    a1 = area_of_E(1)
    assert a1 == SQRT3 / 4 * (Fraction(6, 7) + 3 * Fraction(9, 49))
    vals = [area_of_E(J) for J in range(1, 9)]
    assert all(x < y for x, y in zip(vals, vals[1:]))
    assert all(v < area_limit() for v in vals)


def test_E1_contains_cell_and_one_foot():
    E1 = build_E1()
    T1 = build(1).T1
    assert region_area(E1) == region_area(cell(T1)) + build(1).tau(1, 0).area


def test_rotational_symmetry_of_E():
    R = build(4).region
    assert sorted(R.rotated120().multiset_key()) == sorted(R.multiset_key())


def test_reflection_symmetry_of_E():
    R = build(4).region
    assert R.reflected_y_axis().multiset_key() == R.multiset_key()


def test_down_orientation_is_reflection():
    up = build(3, Orientation.UP).region
    down = build(3, Orientation.DOWN).region
    assert up.scaled(-1).multiset_key() == down.multiset_key()


def test_catalogue_disjoint():
    rep = catalogue_disjoint(build(5))
    assert rep.passed, rep.failures[:3]
    assert rep.checks == 16 * 15 // 2


def test_spacing_small():
    rep = spacing_check(6)
    assert rep.passed
    assert rep.details["min_sq_dist_increasing"]


def test_spacing_needs_two_levels():
    with pytest.raises(ValueError):
        spacing_check(1)


def test_line_counts_at_axis():
    # the w_1 axis through the origin meets T_1 and every foot of family 1
    w1 = Direction.omega(1)
    for J in (2, 3, 4):
        assert line_intersection_count(w1, QS3(0), J, 1) == J + 1
    count, _ = max_intersection_count(w1, 4, 1)
    assert count >= 5


def test_max_count_far_line_is_zero():
    assert line_intersection_count(Direction.omega(0), QS3(1000), 3) == 0


def test_json_has_exact_and_float():
    data = build(2).to_json()
    assert data["J"] == 2
    assert len(data["catalogue"]) == 7
    assert data["area_float"] == pytest.approx(area_of_E(2).to_float())
    assert QS3.from_json(data["area"]) == area_of_E(2)
