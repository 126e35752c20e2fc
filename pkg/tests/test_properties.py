"""Property tests for the stated invariants, driven by hypothesis."""

import itertools
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from quantalg.algebra import is_c_reflexive, is_homomorphism, satisfies
from quantalg.constructions import (
    canonical_model,
    direct_product,
    generated_subalgebra,
    isomorphism,
    permuted,
)
from quantalg.deduction import build_universe, check_proof, least_derivable_distance
from quantalg.dsl import parse_term, parse_workspace, print_algebra, print_signature, print_structure
from quantalg.equations import QuantEq
from quantalg.extended import is_inf
from quantalg.generators import random_algebra, random_conditional, random_surjection, rng_for
from quantalg.qfo import (
    FilterSpec,
    Threshold,
    check_qfo_axioms,
    entry_contains,
    intersect,
    passes_all,
    reduced_product,
    subobject,
    to_algebra,
    to_qfo,
)
from quantalg.terms import App, Signature, Var, apply_substitution, compose, enumerate_terms, subterms

SIG = Signature.of({"f": 2, "g": 1, "c": 0})
UNARY = Signature.of({"f": 1})
CONFIG = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def terms(sig=SIG, names=("x", "y", "z")):
    leaves = st.sampled_from([Var(n) for n in names] + [App(s) for s, k in sig.symbols if k == 0])
    ops = [(s, k) for s, k in sig.symbols if k > 0]

    def extend(children):
        return st.one_of(*(st.tuples(*[children] * k).map(lambda a, s=s: App(s, a)) for s, k in ops))

    return st.recursive(leaves, extend, max_leaves=6)


substitutions = st.dictionaries(st.sampled_from(["x", "y", "z"]), terms(), max_size=3)
bounds = st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)])
seeds = st.integers(0, 2**32 - 1)


# -- terms


@CONFIG
@given(substitutions, substitutions, terms())
def test_substitution_composes(sigma, tau, t):
    assert apply_substitution(compose(sigma, tau), t) == apply_substitution(sigma, apply_substitution(tau, t))


@CONFIG
@given(terms())
def test_parse_print_identity(t):
    assert parse_term(str(t), SIG) == t
    assert parse_term(str(parse_term(str(t), SIG)), SIG) == t


@CONFIG
@given(st.integers(0, 2), st.lists(st.sampled_from(["x", "y"]), unique=True))
def test_enumeration_subterm_closed(depth, names):
    ts = set(enumerate_terms(SIG, names, depth))
    for t in ts:
        assert subterms(t) <= ts


# -- deduction


@st.composite
def hypothesis_sets(draw):
    eqs = draw(st.lists(st.tuples(terms(UNARY), terms(UNARY), bounds), max_size=4))
    return [QuantEq(s, t, b) for s, t, b in eqs]


@CONFIG
@given(hypothesis_sets(), terms(UNARY), terms(UNARY))
def test_table_invariants(hyps, s, t):
    goal = QuantEq(s, t, 0)
    U = build_universe(hyps, goal)
    table = least_derivable_distance(hyps, (), U, record=True)
    for a, b in itertools.product(U, U):
        assert table.bound(a, b) == table.bound(b, a)
    for a, b, c in itertools.product(U, U, U):
        assert table.bound(a, c) <= table.bound(a, b) + table.bound(b, c)
    for a, b in itertools.product(U, U):
        if isinstance(a, App) and isinstance(b, App):
            assert table.bound(a, b) <= table.bound(a.args[0], b.args[0])
    for a, b, v in table.items():
        if not is_inf(v):
            assert check_proof(table.proof(a, b))
    # dropping a hypothesis never lowers a bound
    if hyps:
        fewer = least_derivable_distance(hyps[1:], (), U)
        for a, b in itertools.product(U, U):
            assert fewer.bound(a, b) >= table.bound(a, b)


# -- algebras


@CONFIG
@given(seeds)
def test_subalgebras_and_isomorphic_copies_inherit(seed):
    rng = rng_for(seed)
    A = random_algebra(rng, UNARY, 3)
    ce = random_conditional(rng, UNARY, ("x", "y"))
    perm = dict(zip(A.carrier, [A.carrier[k] for k in rng.permutation(3)]))
    assert satisfies(A, ce) == satisfies(permuted(A, perm), ce)
    if satisfies(A, ce):
        for r in range(1, 4):
            for seed_set in itertools.combinations(A.carrier, r):
                assert satisfies(generated_subalgebra(A, seed_set), ce)


@CONFIG
@given(seeds)
def test_reflexive_images_inherit_basic_equations(seed):
    rng = rng_for(seed)
    _, h = random_surjection(rng, UNARY)
    assert is_homomorphism(h)
    flags = [is_c_reflexive(h, c) for c in (1, 2, 3)]
    assert flags[0] and (flags[1] or not flags[2])
    for c in (1, 2, 3):
        ce = random_conditional(rng, UNARY, ("x", "y"), max_hyps=c - 1, basic=True)
        if flags[c - 1] and satisfies(h.source, ce):
            assert satisfies(h.target, ce)


@CONFIG
@given(seeds)
def test_products_inherit(seed):
    rng = rng_for(seed)
    As = [random_algebra(rng, UNARY, int(rng.integers(1, 4))) for _ in range(2)]
    ce = random_conditional(rng, UNARY, ("x", "y"), basic=True)
    if all(satisfies(A, ce) for A in As):
        assert satisfies(direct_product(As), ce)


# -- canonical model


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_canonical_distance_is_depth_invariant(seed):
    rng = rng_for(seed)
    K = [random_algebra(rng, UNARY, 2)]
    M2 = canonical_model(K, ["x", "y"], 2, dedupe=True)
    M3 = canonical_model(K, ["x", "y"], 3, dedupe=True)
    for s, t in itertools.product(M2.universe, repeat=2):
        assert M2.distance(s, t) == M3.distance(s, t)


# -- structures


@CONFIG
@given(seeds)
def test_functors_commute_with_products_and_subobjects(seed):
    rng = rng_for(seed)
    As = [random_algebra(rng, UNARY, int(rng.integers(1, 3))) for _ in range(2)]
    Ms = [to_qfo(A) for A in As]
    P = reduced_product(Ms, FilterSpec.full(2))
    assert to_algebra(P) == direct_product(As)
    A = As[0]
    sub = generated_subalgebra(A, [A.carrier[-1]])
    assert to_algebra(subobject(Ms[0], sub.carrier)) == sub


@CONFIG
@given(seeds, st.data())
def test_reduced_products_keep_axioms(seed, data):
    rng = rng_for(seed)
    n = data.draw(st.integers(1, 3))
    Ms = [to_qfo(random_algebra(rng, UNARY, int(rng.integers(1, 3)))) for _ in range(n)]
    J = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    R = reduced_product(Ms, FilterSpec(n, J))
    assert passes_all(R)
    assert not check_qfo_axioms(R)[3]


thresholds = st.one_of(st.none(), st.builds(Threshold, bounds, st.booleans()))


@CONFIG
@given(st.lists(thresholds, max_size=4), bounds, st.sampled_from([Fraction(0), Fraction(1, 1000)]))
def test_intersection_is_pointwise(entries, b, shift):
    eps = b + shift
    assert entry_contains(intersect(entries), eps) == all(entry_contains(e, eps) for e in entries)


# -- DSL


@CONFIG
@given(seeds)
def test_printed_objects_parse_back(seed):
    rng = rng_for(seed)
    A = random_algebra(rng, UNARY, int(rng.integers(1, 4)), name="A")
    text = print_signature(UNARY) + "\n" + print_algebra(A, "A") + "\n" + print_structure(to_qfo(A), "M")
    ws = parse_workspace(text)
    assert isomorphism(ws.algebras["A"], A) is not None
    assert to_algebra(ws.structures["M"]) == ws.algebras["A"]
