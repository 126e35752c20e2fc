from fractions import Fraction

import pytest

from quantalg.equations import BasicClass, ConditionalEquation, QuantEq, classify, unconditional
from quantalg.terms import app, var

x, y = var("x"), var("y")
fx, fy = app("f", x), app("f", y)


def test_classify():
    assert classify(unconditional(fx, fy, 1)) is BasicClass.UNCONDITIONAL
    assert classify(ConditionalEquation([QuantEq(x, y, 1)], QuantEq(fx, fy, 1))) is BasicClass.FINITARY_BASIC
    assert classify(ConditionalEquation([QuantEq(fx, y, 1)], QuantEq(x, y, 2))) is BasicClass.GENERAL


def test_bounds_are_finite_and_exact():
    assert QuantEq(x, y, "1/2").bound == Fraction(1, 2)
    with pytest.raises(ValueError):
        QuantEq(x, y, "inf")
    with pytest.raises(ValueError):
        QuantEq(x, y, -1)
    with pytest.raises((TypeError, ValueError)):
        QuantEq(x, y, 0.5)


def test_c_basic():
    ce = ConditionalEquation([QuantEq(x, y, 1)], QuantEq(fx, fy, 1))
    assert not ce.is_c_basic(1)
    assert ce.is_c_basic(2)
    assert not ConditionalEquation([QuantEq(fx, y, 1)], QuantEq(x, y, 1)).is_c_basic(5)


def test_hypotheses_are_a_set():
    h = QuantEq(x, y, 1)
    assert ConditionalEquation([h, h], QuantEq(fx, fy, 1)) == ConditionalEquation([h], QuantEq(fx, fy, 1))
