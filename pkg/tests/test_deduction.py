import itertools
from fractions import Fraction

import pytest

from quantalg import suites
from quantalg.algebra import QuantitativeAlgebra, satisfies, search_countermodel
from quantalg.deduction import (
    Proof,
    ProofStep,
    UniverseError,
    build_universe,
    check_proof,
    is_consistent_probe,
    least_derivable_distance,
)
from quantalg.equations import ConditionalEquation, QuantEq, unconditional
from quantalg.extended import is_inf
from quantalg.generators import random_eq, rng_for
from quantalg.terms import Signature, app, var

x, y, z = var("x"), var("y"), var("z")
fx, fy = app("f", x), app("f", y)
EMPTY = Signature.of({})
UNARY = Signature.of({"f": 1})


def table_for(hyps, goal, axioms=(), depth=0, **kw):
    return least_derivable_distance(hyps, axioms, build_universe(hyps, goal, axioms, depth), **kw)


# -- universe


def test_universe_examples():
    h = [QuantEq(x, y, 1)]
    assert set(build_universe(h, QuantEq(x, y, 1))) == {x, y}
    assert {x, y, fx, fy} <= set(build_universe(h, QuantEq(fx, fy, 1)))
    ax = [unconditional(fx, x, 0)]
    U = build_universe((), QuantEq(app("f", fx), x, 0), ax, depth=2)
    assert {app("f", fx), fx, x} <= set(U)


def test_universe_must_be_subterm_closed():
    with pytest.raises(UniverseError):
        least_derivable_distance((), (), [fx])
    with pytest.raises(UniverseError):
        least_derivable_distance([QuantEq(x, y, 1)], (), [x])


# -- least bounds against semantic oracles


def test_refl():
    t = table_for((), QuantEq(fx, fx, 0))
    assert t.bound(fx, fx) == 0
    assert search_countermodel(UNARY, (), QuantEq(fx, fx, 0)) is None


def test_triangle_is_three_and_tight():
    hyps = [QuantEq(x, y, 1), QuantEq(y, z, 2)]
    assert table_for(hyps, QuantEq(x, z, 3)).bound(x, z) == 3
    # oracle: the path metric p-q-r realises exactly 3
    path = QuantitativeAlgebra.build(EMPTY, "pqr", {}, {("p", "q"): 1, ("q", "r"): 2, ("p", "r"): 3})
    ce = ConditionalEquation(hyps, QuantEq(x, z, Fraction(5, 2)))
    assert not satisfies(path, ce)
    assert satisfies(path, ConditionalEquation(hyps, QuantEq(x, z, 3)))


def test_nexp_is_one_and_tight():
    hyps = [QuantEq(x, y, 1)]
    assert table_for(hyps, QuantEq(fx, fy, 1)).bound(fx, fy) == 1
    ident = QuantitativeAlgebra.build(UNARY, "ab", {"f": lambda a: a}, {("a", "b"): 1})
    assert not satisfies(ident, ConditionalEquation(hyps, QuantEq(fx, fy, Fraction(1, 2))))


def test_unrelated_terms_are_infinite():
    t = table_for([QuantEq(x, y, 1)], QuantEq(x, z, 1))
    assert is_inf(t.bound(x, z))


def test_axiom_application():
    ax = [ConditionalEquation([QuantEq(x, y, 1)], QuantEq(fx, fy, Fraction(1, 2)))]
    hyps = [QuantEq(x, y, 1)]
    t = table_for(hyps, QuantEq(fx, fy, 1), ax)
    assert t.bound(fx, fy) == Fraction(1, 2)
    # unconditional axiom with a non-variable instance
    ax = [unconditional(fx, x, 0)]
    t = table_for((), QuantEq(app("f", fx), x, 0), ax, depth=2)
    assert t.bound(app("f", fx), x) == 0


# -- proofs


def step(rule, conclusion, premises=(), hyps=(), **kw):
    return ProofStep(rule, frozenset(hyps), conclusion, tuple(premises), **kw)


def test_check_proof_examples():
    assert check_proof([step("Refl", QuantEq(x, x, 0))])
    g = [QuantEq(x, y, 1)]
    assert check_proof([step("Assumpt", QuantEq(x, y, 1), hyps=g), step("Symm", QuantEq(y, x, 1), [0], g)])
    g = [QuantEq(x, y, 1), QuantEq(y, z, 2)]
    bad = [
        step("Assumpt", QuantEq(x, y, 1), hyps=g),
        step("Assumpt", QuantEq(y, z, 2), hyps=g),
        step("Triang", QuantEq(x, z, 2), [0, 1], g),
    ]
    v = check_proof(bad)
    assert not v and v.step == 2


def test_check_proof_rejections():
    assert check_proof([step("Refl", QuantEq(x, x, 0)), step("Symm", QuantEq(x, x, 0), [3])]).code == "dangling-premise"
    assert check_proof([step("Assumpt", QuantEq(x, y, 1))]).code == "side-condition"
    assert check_proof([step("Frob", QuantEq(x, x, 0))]).code == "unknown-rule"
    g = [QuantEq(x, y, 2)]
    arch = [step("Assumpt", QuantEq(x, y, 2), hyps=g), step("Arch", QuantEq(x, y, 1), [0], g)]
    assert check_proof(arch).code == "infinitary-arch"


def test_recorded_proofs_are_accepted():
    hyps = [QuantEq(x, y, 1), QuantEq(y, z, 2)]
    t = table_for(hyps, QuantEq(x, z, 3), record=True)
    p = t.proof(x, z)
    assert isinstance(p, Proof)
    assert p.conclusion.conclusion == QuantEq(x, z, 3)
    assert check_proof(p)
    ax = [ConditionalEquation([QuantEq(x, y, 1)], QuantEq(fx, fy, Fraction(1, 2)))]
    t = table_for([QuantEq(fy, fx, 1)], QuantEq(app("f", fy), app("f", fx), 1), ax, record=True)
    p = t.proof(app("f", fx), app("f", fy))
    assert check_proof(p, ax)
    assert p.conclusion.conclusion.bound == Fraction(1, 2)


def test_recorded_proofs_random():
    for i in range(60):
        rng = rng_for(11, i)
        sig = suites.SIG_POOL[i % len(suites.SIG_POOL)]
        hyps = [random_eq(rng, sig, ("x", "y", "z"), 1) for _ in range(3)]
        goal = random_eq(rng, sig, ("x", "y"), 2)
        t = table_for(hyps, goal, record=True)
        for s, u, b in t.items():
            if not is_inf(b):
                p = t.proof(s, u)
                assert check_proof(p), (hyps, s, u)
                assert p.conclusion.conclusion == QuantEq(s, u, b)


# -- consistency


def test_consistency_probe():
    assert not is_consistent_probe([unconditional(x, y, 0)])
    assert is_consistent_probe([])
    assert is_consistent_probe([unconditional(fx, fy, 0)], depth=2)


# -- table invariants


def random_tables(n, seed=5):
    for i in range(n):
        rng = rng_for(seed, i)
        sig = suites.SIG_POOL[i % len(suites.SIG_POOL)]
        hyps = [random_eq(rng, sig, ("x", "y", "z"), 1) for _ in range(int(rng.integers(0, 4)))]
        goal = random_eq(rng, sig, ("x", "y"), 2)
        yield sig, hyps, goal, table_for(hyps, goal)


def test_table_is_nonexpansive_pseudometric():
    for sig, hyps, goal, t in random_tables(60):
        U = t.universe
        for s in U:
            assert t.bound(s, s) == 0
        for s, u in itertools.product(U, U):
            assert t.bound(s, u) == t.bound(u, s)
        for s, u, w in itertools.product(U, U, U):
            assert t.bound(s, w) <= t.bound(s, u) + t.bound(u, w)
        for h in hyps:
            assert t.bound(h.left, h.right) <= h.bound
        apps = [a for a in U if hasattr(a, "args") and a.args]
        for a, b in itertools.product(apps, apps):
            if a.op == b.op:
                assert t.bound(a, b) <= max(t.bound(p, q) for p, q in zip(a.args, b.args))


def test_monotonicity():
    for sig, hyps, goal, t in random_tables(40, seed=6):
        if not hyps:
            continue
        fewer = least_derivable_distance(hyps[:-1], (), t.universe)
        for s, u in itertools.product(t.universe, t.universe):
            assert t.bound(s, u) <= fewer.bound(s, u)
        # a larger universe leaves the old pairs no larger
        wide = tuple(sorted(set(t.universe) | set(build_universe(hyps, QuantEq(x, var("w"), 1)))))
        wt = least_derivable_distance(hyps, (), wide)
        for s, u in itertools.product(t.universe, t.universe):
            assert wt.bound(s, u) <= t.bound(s, u)


# -- the soundness suite must notice an unsound engine


class _Halved:
    def __init__(self, table):
        self.table = table

    def bound(self, s, t):
        b = self.table.bound(s, t)
        return b if is_inf(b) else b / 2


def test_soundness_suite_detects_halved_bounds(monkeypatch):
    real = suites.least_derivable_distance
    monkeypatch.setattr(suites, "least_derivable_distance", lambda *a, **k: _Halved(real(*a, **k)))
    rep = suites.soundness(instances=30)
    assert not rep.passed
    assert rep.failures


def test_soundness_suite_small_run_passes():
    assert suites.soundness(seed=3, instances=20).failures == []
