
import numpy as np
import pytest

from quantalg.dsl import parse_term
from quantalg.terms import (
    App,
    Signature,
    SignatureError,
    TermCapExceeded,
    app,
    apply_substitution,
    compose,
    enumerate_terms,
    subterm_closure,
    subterms,
    var,
    variables_of,
)

x, y = var("x"), var("y")
SIG = Signature.of({"f": 2, "g": 1, "c": 0}, ["x", "y"])


def test_identity_substitution():
    assert apply_substitution({}, app("f", x, y)) == app("f", x, y)


def test_substitution_duplicates_the_image():
    assert apply_substitution({"x": app("g", y)}, app("f", x, x)) == app("f", app("g", y), app("g", y))


def test_swap_substitution():
    # hand induction: f(x, g(y)) -> f(y, g(x))
    assert apply_substitution({"x": y, "y": x}, app("f", x, app("g", y))) == app("f", y, app("g", x))


def test_subterms():
    assert subterms(x) == {x}
    assert subterms(app("f", x, y)) == {app("f", x, y), x, y}
    gx = app("g", x)
    assert subterms(app("f", gx, gx)) == {app("f", gx, gx), gx, x}


def test_enumerate_examples():
    assert enumerate_terms(Signature.of({}), ["x", "y"], 3) == [x, y]
    assert enumerate_terms(Signature.of({"f": 1}), ["x"], 2) == [x, app("f", x), app("f", app("f", x))]
    assert enumerate_terms(Signature.of({"c": 0}), [], 0) == [App("c")]


def test_enumerate_count_matches_recurrence():
    # terms over a binary f and two variables: N(d+1) = 2 + N(d)^2
    n = 2
    for d in range(3):
        assert len(enumerate_terms(Signature.of({"f": 2}), ["x", "y"], d)) == n
        n = 2 + n * n


def test_enumerate_cap():
    with pytest.raises(TermCapExceeded):
        enumerate_terms(Signature.of({"f": 2}), ["x", "y"], 3, cap=100)


def test_variables_of():
    assert variables_of(x) == {"x"}
    assert variables_of(app("f", x, app("g", y))) == {"x", "y"}
    assert variables_of(App("c")) == set()


def test_signature_validation():
    with pytest.raises(SignatureError):
        Signature.of({"f": 1}, ["f"])
    with pytest.raises(SignatureError):
        Signature.of({"f": -1})
    with pytest.raises(SignatureError):
        Signature((("f", 1), ("f", 2)))
    with pytest.raises(SignatureError):
        SIG.check(App("f", (x,)))


def test_enumeration_is_subterm_closed_and_sorted():
    ts = enumerate_terms(SIG, None, 2)
    assert subterm_closure(ts) == set(ts)
    assert ts == sorted(ts)
    assert len(set(ts)) == len(ts)


def test_composition_law():
    ts = enumerate_terms(Signature.of({"f": 2, "g": 1}), ["x", "y"], 2)
    rng = np.random.default_rng(3)
    for _ in range(20):
        sigma = {v: ts[int(rng.integers(len(ts)))] for v in ("x", "y")}
        tau = {v: ts[int(rng.integers(len(ts)))] for v in ("x",)}
        for t in ts[:40]:
            assert apply_substitution(compose(sigma, tau), t) == apply_substitution(sigma, apply_substitution(tau, t))


def test_print_parse_identity_on_enumeration():
    for t in enumerate_terms(SIG, None, 2):
        assert parse_term(str(t), SIG) == t
