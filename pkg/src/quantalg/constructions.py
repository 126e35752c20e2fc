"""Algebra-building constructions: products, subalgebras, quotients by
pseudometrics, the depth-bounded canonical model and the homomorphism
witnesses behind the closure-operator identities."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import (
    Homomorphism,
    QuantitativeAlgebra,
    evaluate,
    induced_subalgebra,
)
from .extended import Bound, is_inf
from .terms import DEFAULT_TERM_CAP, App, Signature, Term, enumerate_terms, term_key


class ConstructionError(ValueError):
    pass


def direct_product(algebras: Sequence[QuantitativeAlgebra], signature: Signature | None = None, name: str = "") -> QuantitativeAlgebra:
    """Cartesian product with componentwise operations and the sup metric.

    The empty product is the one-point algebra on ``{()}``; pass
    ``signature`` in that case."""
    algebras = list(algebras)
    if signature is None:
        if not algebras:
            raise ConstructionError("the empty product needs an explicit signature")
        signature = algebras[0].signature
    for A in algebras:
        if A.signature.symbols != signature.symbols:
            raise ConstructionError("factors have different signatures")
    carrier = tuple(itertools.product(*(A.carrier for A in algebras)))
    ops = {}
    for op, k in signature.symbols:
        table = {}
        for args in itertools.product(carrier, repeat=k):
            table[args] = tuple(A.apply(op, *(a[i] for a in args)) for i, A in enumerate(algebras))
        ops[op] = table
    dist = {}
    for a in carrier:
        for b in carrier:
            dist[(a, b)] = max((A.d(x, y) for A, x, y in zip(algebras, a, b)), default=0)
    from fractions import Fraction

    dist = {k: (v if is_inf(v) else Fraction(v)) for k, v in dist.items()}
    return QuantitativeAlgebra(signature, carrier, ops, dist, name)


def generated_subalgebra(A: QuantitativeAlgebra, seed: Iterable, name: str = "") -> QuantitativeAlgebra:
    """Least operation-closed subset containing ``seed`` (constants included)."""
    closed = set(seed)
    for a in closed:
        if a not in A.index:
            raise ConstructionError(f"seed element {a!r} is not in the carrier")
    while True:
        fresh = set()
        members = [a for a in A.carrier if a in closed]
        for op, k in A.signature.symbols:
            for args in itertools.product(members, repeat=k):
                v = A.apply(op, *args)
                if v not in closed:
                    fresh.add(v)
        if not fresh:
            break
        closed |= fresh
    return induced_subalgebra(A, closed, name)


def subalgebra_violations(sub: QuantitativeAlgebra, ambient: QuantitativeAlgebra) -> list[str]:
    out = []
    if sub.signature.symbols != ambient.signature.symbols:
        return ["signatures differ"]
    for a in sub.carrier:
        if a not in ambient.index:
            out.append(f"{a!r} is not in the ambient carrier")
    if out:
        return out
    for op, k in sub.signature.symbols:
        for args in itertools.product(sub.carrier, repeat=k):
            if sub.apply(op, *args) != ambient.apply(op, *args):
                out.append(f"{op}{args} differs from the ambient algebra")
    for a in sub.carrier:
        for b in sub.carrier:
            if sub.d(a, b) != ambient.d(a, b):
                out.append(f"d({a},{b}) differs from the ambient algebra")
    return out


# ---------------------------------------------------------------------------
# pseudometrics and quotients


@dataclass(frozen=True)
class PseudometricTable:
    """Extended pseudometric on a finite set of points (terms or elements)."""

    points: tuple
    values: Mapping[tuple, Bound]

    def __call__(self, a, b) -> Bound:
        return self.values[(a, b)]

    def kernel_classes(self) -> list[tuple]:
        classes: list[list] = []
        for a in self.points:
            for cls in classes:
                if self.values[(cls[0], a)] == 0:
                    cls.append(a)
                    break
            else:
                classes.append([a])
        return [tuple(c) for c in classes]

    def violations(self, signature: Signature | None = None, algebra: QuantitativeAlgebra | None = None) -> list[str]:
        """Pseudometric axioms, plus non-expansiveness of every operation whose
        arguments and result all lie in ``points``."""
        out = []
        pts = self.points
        for a in pts:
            if self.values[(a, a)] != 0:
                out.append(f"p({a},{a}) != 0")
        for a, b in itertools.combinations(pts, 2):
            if self.values[(a, b)] != self.values[(b, a)]:
                out.append(f"p({a},{b}) is not symmetric")
        for a, b, c in itertools.product(pts, repeat=3):
            if self.values[(a, c)] > self.values[(a, b)] + self.values[(b, c)]:
                out.append(f"triangle fails at {a},{b},{c}")
                break
        if signature is None and algebra is not None:
            signature = algebra.signature
        if signature is None:
            return out
        apply = _applier(signature, algebra, pts)
        for op, k in signature.symbols:
            if k == 0:
                continue
            defined = [(args, apply(op, args)) for args in itertools.product(pts, repeat=k)]
            defined = [(args, v) for args, v in defined if v is not None]
            for (x, u), (y, v) in itertools.combinations(defined, 2):
                if self.values[(u, v)] > max(self.values[(a, b)] for a, b in zip(x, y)):
                    out.append(f"{op} expands p at {x}, {y}")
                    if len(out) > 20:
                        return out
        return out


def _applier(signature: Signature, algebra: QuantitativeAlgebra | None, points):
    members = set(points)
    if algebra is not None:
        return lambda op, args: algebra.apply(op, *args)

    def apply(op, args):
        t = App(op, args)
        return t if t in members else None

    return apply


def pseudometric_from_assignment(A: QuantitativeAlgebra, alpha: Mapping, universe: Sequence[Term]) -> PseudometricTable:
    """Distance in ``A`` between the values of two terms under ``alpha``."""
    values = {t: evaluate(A, alpha, t) for t in universe}
    table = {(s, t): A.d(values[s], values[t]) for s in universe for t in universe}
    return PseudometricTable(tuple(universe), table)


def pseudometric_from_distances(points: Sequence, values: Mapping[tuple, Bound]) -> PseudometricTable:
    return PseudometricTable(tuple(points), dict(values))


@dataclass
class Quotient:
    algebra: QuantitativeAlgebra
    classes: dict  # representative -> tuple of members
    projection: dict  # point -> representative


def quotient_by_pseudometric(
    p: PseudometricTable,
    signature: Signature | None = None,
    algebra: QuantitativeAlgebra | None = None,
    name: str = "",
) -> Quotient:
    """Quotient of the points by the kernel of ``p`` with ``p`` as metric.

    Points are either carrier elements of ``algebra`` or terms (operations
    act syntactically; ``signature`` required).  For terms, each operation on
    classes must be witnessed by some representative tuple whose application
    is again a point, otherwise the universe is not closed enough."""
    if algebra is None and signature is None:
        raise ConstructionError("need a signature or an algebra to supply operations")
    signature = signature if signature is not None else algebra.signature
    bad = p.violations()
    if bad:
        raise ConstructionError("not a pseudometric: " + "; ".join(bad[:3]))
    classes = p.kernel_classes()
    if algebra is None:
        classes = [tuple(sorted(c, key=term_key)) for c in classes]
        classes.sort(key=lambda c: term_key(c[0]))
    reps = [c[0] for c in classes]
    proj = {a: c[0] for c in classes for a in c}
    apply = _applier(signature, algebra, p.points)
    ops = {}
    for op, k in signature.symbols:
        table = {}
        for cls_args in itertools.product(classes, repeat=k):
            results = set()
            for args in itertools.product(*cls_args):
                v = apply(op, args)
                if v is not None:
                    results.add(proj[v])
            if not results:
                raise ConstructionError(
                    f"universe not closed: {op} applied to classes of {[c[0] for c in cls_args]} leaves the universe"
                )
            if len(results) > 1:
                raise ConstructionError(f"kernel is not a congruence for {op}")
            table[tuple(c[0] for c in cls_args)] = results.pop()
        ops[op] = table
    dist = {(a, b): p(a, b) for a in reps for b in reps}
    A = QuantitativeAlgebra(signature, tuple(reps), ops, dist, name)
    return Quotient(A, {c[0]: c for c in classes}, proj)


# ---------------------------------------------------------------------------
# canonical model


@dataclass
class CanonicalModel:
    """Product over assignment-induced components with the sup metric.

    ``index[i]`` is ``(member position in K, assignment)``; component ``i``
    is the image subalgebra generated by that assignment, which realises
    the quotient of the term algebra by the induced pseudometric."""

    K: tuple[QuantitativeAlgebra, ...]
    variables: tuple[str, ...]
    universe: tuple[Term, ...]
    index: list[tuple[int, dict]]
    tables: list[tuple]
    components: list[QuantitativeAlgebra]
    product: QuantitativeAlgebra
    gamma: dict[Term, tuple]
    signature: Signature = field(repr=False, default=None)

    def element(self, t: Term) -> tuple:
        try:
            return self.gamma[t]
        except KeyError:
            raise ConstructionError(f"{t} is outside the bounded universe") from None

    def distance(self, s: Term, t: Term) -> Bound:
        return self.product.d(self.element(s), self.element(t))

    def manifest(self) -> list[str]:
        lines = []
        for i, ((k, alpha), comp) in enumerate(zip(self.index, self.components)):
            member = self.K[k].name or f"K[{k}]"
            asg = ", ".join(f"{x}->{v}" for x, v in alpha.items())
            lines.append(f"component {i}: {member} [{asg}] size {len(comp.carrier)}")
        return lines


def _assignment_table(A, alpha, universe):
    values = [evaluate(A, alpha, t) for t in universe]
    return tuple(A.d(u, v) for u in values for v in values)


def canonical_model(
    K: Sequence[QuantitativeAlgebra],
    variables: Sequence[str],
    depth: int,
    *,
    dedupe: bool = False,
    cap: int = DEFAULT_TERM_CAP,
    max_product: int = 100_000,
) -> CanonicalModel:
    K = tuple(K)
    if not K:
        raise ConstructionError("K must be nonempty")
    sig = K[0].signature
    for A in K:
        if A.signature.symbols != sig.symbols:
            raise ConstructionError("members of K have different signatures")
    variables = tuple(variables)
    universe = tuple(enumerate_terms(sig, variables, depth, cap))
    index, tables, components = [], [], []
    seen = set()
    for k, A in enumerate(K):
        for values in itertools.product(A.carrier, repeat=len(variables)):
            alpha = dict(zip(variables, values))
            table = _assignment_table(A, alpha, universe)
            if dedupe and table in seen:
                continue
            seen.add(table)
            index.append((k, alpha))
            tables.append(table)
            components.append(generated_subalgebra(A, values))
    size = 1
    for c in components:
        size *= len(c.carrier)
    if size > max_product:
        raise ConstructionError(f"canonical model would have {size} elements (limit {max_product})")
    product = direct_product(components, sig)
    gamma = {t: tuple(evaluate(K[k], alpha, t) for k, alpha in index) for t in universe}
    return CanonicalModel(K, variables, universe, index, tables, components, product, gamma, sig)


def component_quotient(model: CanonicalModel, i: int) -> Quotient:
    """The quotient of the bounded universe by component ``i``'s pseudometric."""
    k, alpha = model.index[i]
    p = pseudometric_from_assignment(model.K[k], alpha, model.universe)
    return quotient_by_pseudometric(p, model.signature)


def weak_universality_beta(model: CanonicalModel, member: int, alpha: Mapping) -> Homomorphism:
    """Projection onto the component induced by ``alpha`` followed by the
    isomorphism of that component onto the image of ``alpha`` in the member."""
    A = model.K[member]
    alpha = {x: alpha[x] for x in model.variables}
    table = _assignment_table(A, alpha, model.universe)
    try:
        j = next(i for i, (k, a) in enumerate(model.index) if k == member and a == alpha)
    except StopIteration:
        try:
            j = model.tables.index(table)
        except ValueError:
            raise ConstructionError("no component carries the pseudometric of this assignment") from None
    kj, alpha_j = model.index[j]
    Aj = model.K[kj]
    # component element -> term witnessing it -> value under alpha
    witness = {}
    for t in model.universe:
        witness.setdefault(evaluate(Aj, alpha_j, t), t)
    comp = model.components[j]
    missing = [e for e in comp.carrier if e not in witness]
    if missing:
        raise ConstructionError(f"depth too small: component elements {missing} have no term witness")
    iso = {e: evaluate(A, alpha, witness[e]) for e in comp.carrier}
    mapping = {u: iso[u[j]] for u in model.product.carrier}
    return Homomorphism(model.product, A, mapping)


def weak_universality_pair(model: CanonicalModel, member: int, alpha: Mapping, s: Term, t: Term):
    """Elements ``u, v`` of the canonical model that agree off the component
    of ``alpha`` and carry the classes of ``s`` and ``t`` there."""
    alpha = {x: alpha[x] for x in model.variables}
    j = next(i for i, (k, a) in enumerate(model.index) if k == member and a == alpha)
    base = model.element(s)
    u = base
    v = tuple(model.element(t)[i] if i == j else base[i] for i in range(len(base)))
    return u, v


def r_of_K(K: Sequence[QuantitativeAlgebra]) -> int:
    """Successor of the largest carrier size."""
    return max((len(A.carrier) for A in K), default=0) + 1


# ---------------------------------------------------------------------------
# witnesses for the closure-operator identities


def pullback_restriction(f: Homomorphism, sub: QuantitativeAlgebra) -> Homomorphism:
    """Restrict a surjective ``f: B -> C`` to ``f^{-1}(sub) -> sub`` for a
    subalgebra ``sub`` of ``C``."""
    bad = subalgebra_violations(sub, f.target)
    if bad:
        raise ConstructionError("not a subalgebra of the target: " + bad[0])
    keep = set(sub.carrier)
    pre = [b for b in f.source.carrier if f.mapping[b] in keep]
    B1 = induced_subalgebra(f.source, pre)
    return Homomorphism(B1, sub, {b: f.mapping[b] for b in B1.carrier})


def product_of_homomorphisms(fs: Sequence[Homomorphism], signature: Signature | None = None) -> Homomorphism:
    fs = list(fs)
    if signature is None:
        if not fs:
            raise ConstructionError("the empty product needs an explicit signature")
        signature = fs[0].source.signature
    src = direct_product([f.source for f in fs], signature)
    tgt = direct_product([f.target for f in fs], signature)
    mapping = {b: tuple(f.mapping[x] for f, x in zip(fs, b)) for b in src.carrier}
    return Homomorphism(src, tgt, mapping)


def embed_product_of_subalgebras(
    subs: Sequence[QuantitativeAlgebra], ambients: Sequence[QuantitativeAlgebra], signature: Signature | None = None
) -> Homomorphism:
    """Inclusion of the product of the ``subs`` into the product of the
    ``ambients``; componentwise subalgebra relations are checked first."""
    if len(subs) != len(ambients):
        raise ConstructionError("factor lists differ in length")
    for i, (a, b) in enumerate(zip(subs, ambients)):
        bad = subalgebra_violations(a, b)
        if bad:
            raise ConstructionError(f"factor {i} is not a subalgebra: {bad[0]}")
    if signature is None and subs:
        signature = subs[0].signature
    PA = direct_product(subs, signature)
    PB = direct_product(ambients, signature)
    return Homomorphism(PA, PB, {a: a for a in PA.carrier})


# ---------------------------------------------------------------------------
# isomorphism helpers


def isomorphism(A: QuantitativeAlgebra, B: QuantitativeAlgebra) -> dict | None:
    """An isometric algebra isomorphism ``A -> B`` found by backtracking."""
    if len(A.carrier) != len(B.carrier) or A.signature.symbols != B.signature.symbols:
        return None
    src = list(A.carrier)
    chosen: dict = {}
    used = set()

    def consistent() -> bool:
        for op, k in A.signature.symbols:
            for args in itertools.product(list(chosen), repeat=k):
                v = A.apply(op, *args)
                if v in chosen and chosen[v] != B.apply(op, *(chosen[a] for a in args)):
                    return False
        return True

    def extend(i: int) -> bool:
        if i == len(src):
            return True
        a = src[i]
        for b in B.carrier:
            if b in used:
                continue
            if any(A.d(a, x) != B.d(b, chosen[x]) for x in chosen):
                continue
            chosen[a] = b
            used.add(b)
            if consistent() and extend(i + 1):
                return True
            del chosen[a]
            used.discard(b)
        return False

    return dict(chosen) if extend(0) else None


def permuted(A: QuantitativeAlgebra, perm: Mapping) -> QuantitativeAlgebra:
    """Relabel ``A`` through the bijection ``perm``."""
    carrier = tuple(perm[a] for a in A.carrier)
    ops = {op: {tuple(perm[a] for a in args): perm[v] for args, v in table.items()} for op, table in A.operations.items()}
    dist = {(perm[a], perm[b]): v for (a, b), v in A.distance.items()}
    return QuantitativeAlgebra(A.signature, carrier, ops, dist, A.name)
