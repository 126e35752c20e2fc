from fractions import Fraction

import pytest

from quantalg import QuantitativeAlgebra, Signature, var

EMPTY = Signature.of({})
UNARY = Signature.of({"f": 1})
X, Y, Z = var("x"), var("y"), var("z")


def two_point(d=1, sig=UNARY, f=None, name=""):
    """{a, b} at distance ``d``; ``f`` defaults to the identity."""
    ops = {}
    if sig.symbols:
        ops = {"f": f or (lambda a: a)}
    return QuantitativeAlgebra.build(sig, "ab", ops, {("a", "b"): d}, name)


def swap(d=1):
    return two_point(d, f=lambda a: "b" if a == "a" else "a")


@pytest.fixture
def half():
    return Fraction(1, 2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
