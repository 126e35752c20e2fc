import itertools
from fractions import Fraction

import pytest

from quantalg.algebra import (
    Homomorphism,
    InvalidAlgebra,
    QuantitativeAlgebra,
    congruence_to_pseudometric,
    counterexample,
    enumerate_algebras,
    evaluate,
    homomorphism_violations,
    image_algebra,
    induced_subalgebra,
    is_c_reflexive,
    is_homomorphism,
    reflexivity_failure,
    satisfies,
    satisfies_theory,
    search_countermodel,
    validate_algebra,
)
from quantalg.constructions import isomorphism, permuted
from quantalg.equations import ConditionalEquation, QuantEq, unconditional
from quantalg.extended import INF
from quantalg.generators import GRID, random_algebra, random_conditional, random_surjection, rng_for
from quantalg.terms import App, Signature, app, var

from conftest import EMPTY, UNARY, swap, two_point

x, y, z = var("x"), var("y"), var("z")
BINARY = Signature.of({"g": 2})


# -- validation


def test_valid_examples():
    one = QuantitativeAlgebra.build(UNARY, "a", {"f": lambda a: a}, {})
    assert validate_algebra(one) == []
    assert validate_algebra(swap()) == []
    assert validate_algebra(two_point(f=lambda a: "a")) == []


def test_expansive_binary_rejected_with_pair():
    # inputs (a, *) and (c, *) differ by 1/2 while the outputs a, b differ by 1
    A = QuantitativeAlgebra.build(BINARY, "abc", {"g": lambda p, q: "a" if p == "a" else "b"},
                                  {("a", "b"): 1, ("a", "c"): Fraction(1, 2), ("b", "c"): Fraction(1, 2)})
    problems = validate_algebra(A)
    assert problems and any("g" in p for p in problems)


def test_metric_axioms_checked():
    assert validate_algebra(QuantitativeAlgebra.build(EMPTY, "abc", {}, {("a", "b"): 1, ("b", "c"): 1, ("a", "c"): 3}))
    assert validate_algebra(QuantitativeAlgebra.build(EMPTY, "ab", {}, {("a", "b"): 0}))
    with pytest.raises(InvalidAlgebra):
        QuantitativeAlgebra.build(EMPTY, "ab", {}, {})


def test_infinite_distances_allowed():
    A = QuantitativeAlgebra.build(EMPTY, "ab", {}, {("a", "b"): INF})
    assert A.d("a", "b") == INF


# -- evaluation and satisfaction


def test_evaluate():
    A = swap()
    assert evaluate(A, {"x": "a"}, x) == "a"
    assert evaluate(A, {"x": "a"}, app("f", app("f", x))) == "a"
    C = QuantitativeAlgebra.build(Signature.of({"c": 0}), "ab", {"c": lambda: "b"}, {("a", "b"): 1})
    assert evaluate(C, {}, App("c")) == "b"


def brute_satisfies(A, ce):
    names = sorted(ce.variables())
    for vals in itertools.product(A.carrier, repeat=len(names)):
        alpha = dict(zip(names, vals))
        if all(A.d(evaluate(A, alpha, h.left), evaluate(A, alpha, h.right)) <= h.bound for h in ce.hypotheses):
            c = ce.conclusion
            if A.d(evaluate(A, alpha, c.left), evaluate(A, alpha, c.right)) > c.bound:
                return False
    return True


def test_satisfies_examples():
    one = QuantitativeAlgebra.build(UNARY, "a", {"f": lambda a: a}, {})
    ce = ConditionalEquation([QuantEq(x, y, 5)], QuantEq(app("f", x), y, 0))
    assert satisfies(one, ce)
    A = two_point(1)
    assert satisfies(A, unconditional(x, y, 1))
    half = unconditional(x, y, Fraction(1, 2))
    assert not satisfies(A, half)
    alpha = counterexample(A, half)
    assert A.d(alpha["x"], alpha["y"]) == 1
    assert satisfies(A, ConditionalEquation([QuantEq(x, y, 0)], QuantEq(x, y, 0)))
    assert satisfies_theory(A, [])
    assert satisfies_theory(A, [unconditional(x, y, 1)])
    assert not satisfies_theory(two_point(2), [unconditional(x, y, 1)])


def test_satisfies_matches_brute_force():
    for i in range(150):
        rng = rng_for(21, i)
        sig = (UNARY, BINARY, Signature.of({"f": 1, "c": 0}))[i % 3]
        A = random_algebra(rng, sig, int(rng.integers(1, 4)))
        ce = random_conditional(rng, sig, ("x", "y", "z"))
        assert satisfies(A, ce) == brute_satisfies(A, ce)


def test_satisfaction_invariant_under_isomorphism():
    for i in range(60):
        rng = rng_for(22, i)
        A = random_algebra(rng, UNARY, 3)
        perm = dict(zip(A.carrier, [A.carrier[k] for k in rng.permutation(3)]))
        B = permuted(A, perm)
        assert isomorphism(A, B) is not None
        ce = random_conditional(rng, UNARY, ("x", "y"))
        assert satisfies(A, ce) == satisfies(B, ce)


# -- homomorphisms


def test_homomorphism_examples():
    A = swap()
    assert is_homomorphism(Homomorphism(A, A, {"a": "a", "b": "b"}))
    one = QuantitativeAlgebra.build(UNARY, "p", {"f": lambda a: a}, {})
    assert is_homomorphism(Homomorphism(two_point(1), one, {"a": "p", "b": "p"}))
    h = Homomorphism(two_point(1), two_point(2), {"a": "a", "b": "b"})
    assert not is_homomorphism(h)
    assert homomorphism_violations(h)


def test_homomorphism_commutation_checked():
    h = Homomorphism(swap(), two_point(1), {"a": "a", "b": "b"})
    assert not is_homomorphism(h)


def brute_reflexive(h, c):
    S, T = h.source, h.target
    image = sorted(set(h.mapping.values()), key=T.carrier.index)
    for size in range(c):
        for B2 in itertools.combinations(image, size):
            ok = False
            for m in range(size, len(S.carrier) + 1):
                for B1 in itertools.combinations(S.carrier, m):
                    if {h.mapping[a] for a in B1} != set(B2):
                        continue
                    if all(S.d(a, b) == T.d(h.mapping[a], h.mapping[b]) for a in B1 for b in B1):
                        ok = True
                        break
                if ok:
                    break
            if not ok:
                return False
    return True


def test_reflexivity_examples():
    h = Homomorphism(two_point(2), two_point(1), {"a": "a", "b": "b"})
    assert is_homomorphism(h)
    assert is_c_reflexive(h, 1) and is_c_reflexive(h, 2)
    assert not is_c_reflexive(h, 3)
    assert set(reflexivity_failure(h, 3)) == {"a", "b"}
    iso = Homomorphism(swap(), swap(), {"a": "b", "b": "a"})
    assert all(is_c_reflexive(iso, c) for c in range(1, 6))


def test_reflexivity_matches_brute_force_and_is_antitone():
    for i in range(80):
        kind, h = random_surjection(rng_for(23, i), UNARY)
        flags = [is_c_reflexive(h, c) for c in range(1, 5)]
        assert flags == [brute_reflexive(h, c) for c in range(1, 5)]
        assert flags[0]
        assert all(a or not b for a, b in zip(flags, flags[1:]))


# -- subalgebras and congruences


def test_image_and_induced():
    A = QuantitativeAlgebra.build(UNARY, "abc", {"f": lambda a: "a"}, {("a", "b"): 1, ("a", "c"): 1, ("b", "c"): 1})
    sub = induced_subalgebra(A, ["a", "b"])
    assert sub.carrier == ("a", "b")
    with pytest.raises(ValueError):
        induced_subalgebra(QuantitativeAlgebra.build(UNARY, "ab", {"f": lambda a: "b"}, {("a", "b"): 1}), ["a"])
    ident = Homomorphism(A, A, {c: c for c in A.carrier})
    assert image_algebra(ident) == A


def test_congruence_tables():
    A = QuantitativeAlgebra.build(UNARY, "abc", {"f": lambda a: a}, {("a", "b"): 1, ("a", "c"): 2, ("b", "c"): 1})
    disc = congruence_to_pseudometric(A, [["a"], ["b"], ["c"]])
    assert all(disc[(p, q)] == (p != q) for p in "abc" for q in "abc")
    total = congruence_to_pseudometric(A, [["a", "b", "c"]])
    assert set(total.values()) == {0}
    two = congruence_to_pseudometric(A, [["a", "b"], ["c"]])
    assert two[("a", "b")] == 0 and two[("a", "c")] == 1 and two[("b", "c")] == 1


# -- countermodels


def test_countermodel_examples():
    cm = search_countermodel(EMPTY, [QuantEq(x, y, 1)], QuantEq(x, y, Fraction(1, 2)))
    assert cm is not None and len(cm.algebra) == 2
    assert cm.algebra.d(*cm.algebra.carrier) == 1
    assert search_countermodel(UNARY, [], QuantEq(app("f", x), app("f", x), 0)) is None
    cm = search_countermodel(EMPTY, [QuantEq(x, y, 1), QuantEq(y, z, 1)], QuantEq(x, z, 1))
    A, a = cm.algebra, cm.assignment
    assert len(A) == 3 and A.d(a["x"], a["z"]) == 2


def test_enumeration_count_small():
    # f on 2 points with grid {1}: all 4 maps are non-expansive
    assert len(list(enumerate_algebras(UNARY, 2, [Fraction(1)]))) == 4
    # with d in {1/2, 1, 2, inf} there are 4 metrics, each admitting the 4 maps
    assert len(list(enumerate_algebras(UNARY, 2, GRID))) == 16
