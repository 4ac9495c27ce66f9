import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lipradon.field import ONE, QS3, SQRT3, ZERO, qs3, qs3_arith, qs3_sign, qs3_to_float
from oracles import decimal_value

rats = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
elems = st.builds(QS3, rats, rats)
nonzero = elems.filter(lambda x: x != 0)


@given(elems, elems, elems)
def test_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == ZERO
    assert x * ONE == x


@given(nonzero)
def test_inverse(x):
    assert x * x.inverse() == ONE
    assert x / x == ONE


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        QS3(1, 1) / ZERO
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_sqrt3_squares_to_three():
    assert SQRT3 * SQRT3 == QS3(3)
    assert SQRT3**2 == 3
    assert (2 / SQRT3) == SQRT3 * Fraction(2, 3)


@given(elems)
def test_sign_matches_high_precision(x):
    ref = decimal_value(x)
    expected = (ref > 0) - (ref < 0)
    assert x.sign() == expected
    assert qs3_sign(x) == expected


def test_sign_near_cancellation():
    # 97/56 is a convergent of sqrt(3); the difference is about 1e-4
    x = QS3(Fraction(97, 56), -1)
    assert x.sign() == 1
    # 18817/10864 overshoots sqrt(3) by about 2e-9
    y = QS3(Fraction(-18817, 10864), 1)
    assert y.sign() == -1
    assert (x - x).sign() == 0


@given(elems)
def test_to_float_is_accurate(x):
    ref = float(decimal_value(x))
    got = x.to_float()
    assert got == pytest.approx(ref, rel=4e-16, abs=1e-300)
    assert qs3_to_float(x) == got


def test_to_float_no_cancellation():
    # a - b sqrt3 with a ~ b sqrt3: naive evaluation loses most digits
    x = QS3(Fraction(1351, 780), -1)
    assert x.to_float() == pytest.approx(float(decimal_value(x)), rel=1e-15)


@given(elems, elems)
def test_ordering_consistent_with_floats(x, y):
    fx, fy = float(decimal_value(x)), float(decimal_value(y))
    if fx < fy:
        assert x < y and not x >= y
    elif fx > fy:
        assert x > y


@given(elems)
def test_json_round_trip(x):
    assert QS3.from_json(x.to_json()) == x


@given(rats)
def test_rational_embedding(q):
    x = QS3(q)
    assert x.is_rational()
    assert x == q
    assert hash(x) == hash(q)


def test_arith_helper():
    assert qs3_arith(1, SQRT3, "add") == QS3(1, 1)
    assert qs3_arith(SQRT3, SQRT3, "mul") == 3
    assert qs3_arith(SQRT3, 3, "div") == QS3(0, Fraction(1, 3))
    assert qs3_arith(QS3(2), QS3(0, 1), "sub") == QS3(2, -1)
    with pytest.raises(ZeroDivisionError):
        qs3_arith(1, 0, "div")
    with pytest.raises(ValueError):
        qs3_arith(1, 2, "pow")


def test_norm_and_conjugate():
    x = qs3(Fraction(1, 2), 3)
    assert x.norm() == Fraction(1, 4) - 27
    assert x * x.conjugate() == x.norm()


def test_abs_and_float_of_irrational():
    assert abs(QS3(1, -1)) == QS3(-1, 1)
    assert float(SQRT3) == math.sqrt(3)
