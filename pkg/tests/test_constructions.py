import itertools
from fractions import Fraction

import pytest

from quantalg.algebra import Homomorphism, QuantitativeAlgebra, evaluate, is_c_reflexive, is_homomorphism, satisfies, validate_algebra
from quantalg.constructions import (
    ConstructionError,
    canonical_model,
    component_quotient,
    direct_product,
    embed_product_of_subalgebras,
    generated_subalgebra,
    isomorphism,
    product_of_homomorphisms,
    pseudometric_from_assignment,
    pseudometric_from_distances,
    pullback_restriction,
    quotient_by_pseudometric,
    r_of_K,
    subalgebra_violations,
    weak_universality_beta,
    weak_universality_pair,
)
from quantalg.equations import ConditionalEquation, QuantEq
from quantalg.generators import random_algebra, random_conditional, random_surjection, rng_for
from quantalg.terms import enumerate_terms, var

from conftest import EMPTY, UNARY, swap, two_point

x, y = var("x"), var("y")


def point(sig=UNARY):
    return QuantitativeAlgebra.build(sig, "p", {s: (lambda *a: "p") for s, _ in sig.symbols}, {})


# -- products


def test_product_distance_is_componentwise_max():
    P = direct_product([two_point(1, EMPTY), two_point(2, EMPTY)])
    assert len(P) == 4
    assert P.d(("a", "a"), ("b", "b")) == 2
    assert P.d(("a", "a"), ("b", "a")) == 1
    assert P.d(("a", "a"), ("a", "b")) == 2
    assert validate_algebra(P) == []


def test_product_with_point_is_isomorphic():
    A = swap()
    assert isomorphism(direct_product([A, point()]), A) is not None
    empty = direct_product([], UNARY)
    assert empty.carrier == ((),)


def test_product_satisfies_what_factors_satisfy():
    for i in range(40):
        rng = rng_for(31, i)
        As = [random_algebra(rng, UNARY, int(rng.integers(1, 3))) for _ in range(2)]
        ce = random_conditional(rng, UNARY, ("x", "y"))
        if all(satisfies(A, ce) for A in As):
            assert satisfies(direct_product(As), ce)


# -- subalgebras


def test_generated_subalgebra():
    A = two_point(f=lambda a: "b")
    assert generated_subalgebra(A, A.carrier) == A
    assert generated_subalgebra(A, ["a"]).carrier == ("a", "b")
    assert generated_subalgebra(A, ["b"]).carrier == ("b",)
    assert subalgebra_violations(generated_subalgebra(A, ["b"]), A) == []


# -- pseudometrics and quotients


def test_pseudometric_from_assignment():
    A = two_point(1, EMPTY)
    p = pseudometric_from_assignment(A, {"x": "a", "y": "b"}, [x, y])
    assert p(x, y) == 1 and p(x, x) == 0
    const = pseudometric_from_assignment(A, {"x": "a", "y": "a"}, [x, y])
    assert const(x, y) == 0


def test_quotient_of_discrete_table_is_identity():
    A = swap()
    p = pseudometric_from_distances(A.carrier, {(a, b): A.d(a, b) for a in A.carrier for b in A.carrier})
    q = quotient_by_pseudometric(p, algebra=A)
    assert [len(c) for c in q.classes.values()] == [1, 1]
    assert isomorphism(q.algebra, A) is not None


def test_quotient_rejects_noncongruence():
    A = QuantitativeAlgebra.build(UNARY, "abc", {"f": {"a": "a", "b": "c", "c": "b"}}, lambda p, q: 0 if p == q else 1)
    # a ~ b but f(a)=a, f(b)=c are apart
    vals = {(p, q): 0 if p == q or {p, q} == {"a", "b"} else 1 for p in "abc" for q in "abc"}
    with pytest.raises(ConstructionError):
        quotient_by_pseudometric(pseudometric_from_distances("abc", vals), algebra=A)


def test_term_quotient_is_the_image():
    # bijection class(s) -> alpha(s) onto the generated image
    for i in range(30):
        rng = rng_for(32, i)
        A = random_algebra(rng, UNARY, 3)
        alpha = {"x": A.carrier[int(rng.integers(3))]}
        U = enumerate_terms(UNARY, ["x"], 3)
        q = quotient_by_pseudometric(pseudometric_from_assignment(A, alpha, U), UNARY)
        image = generated_subalgebra(A, alpha.values())
        iso = {rep: evaluate(A, alpha, rep) for rep in q.algebra.carrier}
        assert sorted(iso.values(), key=A.carrier.index) == list(image.carrier)
        assert is_homomorphism(Homomorphism(q.algebra, image, iso))
        for s, t in itertools.product(q.algebra.carrier, repeat=2):
            assert q.algebra.d(s, t) == image.d(iso[s], iso[t])


# -- canonical model


def test_canonical_model_two_point_empty_signature():
    A = two_point(1, EMPTY, name="A")
    M = canonical_model([A], ["x", "y"], 2)
    assert len(M.index) == 4
    assert [len(c) for c in M.components] == [1, 2, 2, 1]
    assert len(M.product) == 4
    assert M.distance(x, y) == 1
    assert M.distance(x, x) == 0
    beta = weak_universality_beta(M, 0, {"x": "a", "y": "b"})
    assert is_homomorphism(beta)
    assert beta(M.element(x)) == "a" and beta(M.element(y)) == "b"
    assert set(beta.mapping.values()) == {"a", "b"}


def test_canonical_model_degenerate():
    M = canonical_model([point()], ["x", "y"], 2)
    assert len(M.product) == 1


def test_canonical_model_limit():
    with pytest.raises(ConstructionError, match="limit"):
        canonical_model([swap()], ["x", "y"], 2, max_product=3)


def test_canonical_model_theorem_sweep():
    """A d^K bound holds in the model iff every member satisfies the equation."""
    K = [swap(), two_point(2, f=lambda a: "a")]
    M = canonical_model(K, ["x", "y"], 2)
    for s, t in itertools.combinations(M.universe, 2):
        for eps in (0, Fraction(1, 2), 1, 2):
            ce = ConditionalEquation([], QuantEq(s, t, eps))
            in_K = all(satisfies(A, ce) for A in K)
            assert in_K == (M.distance(s, t) <= eps)
            assert satisfies(M.product, ce) == in_K


def test_weak_universality_beta_all_assignments():
    K = [swap(), two_point(2, f=lambda a: "a")]
    M = canonical_model(K, ["x", "y"], 2)
    for k, A in enumerate(K):
        for vals in itertools.product(A.carrier, repeat=2):
            alpha = dict(zip("xy", vals))
            beta = weak_universality_beta(M, k, alpha)
            assert is_homomorphism(beta)
            for t in M.universe:
                assert beta(M.element(t)) == evaluate(A, alpha, t)
            s, t = M.universe[0], M.universe[-1]
            u, v = weak_universality_pair(M, k, alpha, s, t)
            assert M.product.d(u, v) == A.d(beta(u), beta(v))


def test_components_match_term_quotients():
    M = canonical_model([swap()], ["x", "y"], 2)
    for i, comp in enumerate(M.components):
        assert isomorphism(component_quotient(M, i).algebra, comp) is not None


def test_r_of_K():
    assert r_of_K([point()]) == 2
    three = QuantitativeAlgebra.discrete(EMPTY, "abc")
    assert r_of_K([two_point(1, EMPTY), three]) == 4
    assert r_of_K([QuantitativeAlgebra.discrete(EMPTY, range(10))]) == 11


# -- closure witnesses


def test_pullback_restriction_examples():
    A = swap()
    ident = Homomorphism(A, A, {"a": "a", "b": "b"})
    assert pullback_restriction(ident, A).mapping == ident.mapping
    collapse = Homomorphism(A, point(), {"a": "p", "b": "p"})
    r = pullback_restriction(collapse, point())
    assert len(r.source) == 2 and is_homomorphism(r)


def test_product_of_homomorphisms_examples():
    A = swap()
    ident = Homomorphism(A, A, {"a": "a", "b": "b"})
    collapse = Homomorphism(A, point(), {"a": "p", "b": "p"})
    h = product_of_homomorphisms([ident, collapse])
    assert is_homomorphism(h)
    assert set(h.mapping.values()) == {("a", "p"), ("b", "p")}
    e = product_of_homomorphisms([], UNARY)
    assert e.mapping == {(): ()}


def test_embed_product_examples():
    A = two_point(f=lambda a: "b")
    sub = generated_subalgebra(A, ["b"])
    e = embed_product_of_subalgebras([sub, A], [A, A])
    assert is_homomorphism(e)
    assert len(e.source) == 2 and len(e.target) == 4
    with pytest.raises(ConstructionError):
        embed_product_of_subalgebras([A], [sub])


def test_witnesses_preserve_reflexivity():
    for i in range(40):
        rng = rng_for(33, i)
        _, f = random_surjection(rng, UNARY)
        _, g = random_surjection(rng, UNARY)
        for c in (1, 2, 3):
            if is_c_reflexive(f, c):
                sub = generated_subalgebra(f.target, [f.target.carrier[0]])
                assert is_c_reflexive(pullback_restriction(f, sub), c)
            if is_c_reflexive(f, c) and is_c_reflexive(g, c):
                assert is_c_reflexive(product_of_homomorphisms([f, g]), c)
