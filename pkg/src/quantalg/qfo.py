"""Quantitative first-order structures.

Each relation family ``{=_e | e rational}`` is stored per pair as a
:class:`Threshold`: the up-closed set ``{e >= bound}`` (closed) or
``{e > bound}`` (open); ``None`` is the empty set (never related).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .algebra import QuantitativeAlgebra
from .equations import ConditionalEquation, QuantEq
from .extended import as_bound, fmt_bound, is_inf
from .terms import Signature, Term, Var, variables_of


@dataclass(frozen=True, order=True)
class Threshold:
    bound: Fraction
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "bound", as_bound(self.bound, allow_inf=False))

    def contains(self, eps) -> bool:
        return eps > self.bound or (eps == self.bound and self.closed)

    def __str__(self):
        return f"bound {fmt_bound(self.bound)} {'closed' if self.closed else 'open'}"


Entry = Union[Threshold, None]
EVERYTHING = Threshold(Fraction(0), True)


def entry_contains(t: Entry, eps) -> bool:
    return t is not None and t.contains(eps)


def entry_subset(a: Entry, b: Entry) -> bool:
    """Set inclusion of the threshold sets ``a ⊆ b``."""
    if a is None:
        return True
    if b is None:
        return False
    return b.bound < a.bound or (b.bound == a.bound and (b.closed or not a.closed))


def intersect(entries: Iterable[Entry]) -> Entry:
    entries = list(entries)
    if any(e is None for e in entries):
        return None
    if not entries:
        return EVERYTHING
    top = max(e.bound for e in entries)
    return Threshold(top, all(e.closed for e in entries if e.bound == top))


def compose_entries(a: Entry, b: Entry) -> Entry:
    """``{e + d | e in a, d in b}``."""
    if a is None or b is None:
        return None
    return Threshold(a.bound + b.bound, a.closed and b.closed)


def fmt_entry(e: Entry) -> str:
    return "infinite" if e is None else str(e)


class QFOAxiomError(ValueError):
    def __init__(self, failures: Mapping[int, list[str]]):
        self.failures = {k: v for k, v in failures.items() if v}
        axioms = ", ".join(f"({k})" for k in sorted(self.failures))
        first = next(iter(self.failures.values()))[0] if self.failures else ""
        super().__init__(f"axiom {axioms} fails: {first}")


@dataclass(frozen=True, eq=False)
class ThresholdStructure:
    signature: Signature
    carrier: tuple
    operations: Mapping[str, Mapping[tuple, object]]
    relation: Mapping[tuple, Entry]
    name: str = ""

    def __post_init__(self):
        carrier = tuple(self.carrier)
        object.__setattr__(self, "carrier", carrier)
        missing = [(a, b) for a in carrier for b in carrier if (a, b) not in self.relation]
        if missing:
            raise ValueError(f"relation entry missing for pair {missing[0]}")
        for op, k in self.signature.symbols:
            table = self.operations.get(op)
            if table is None:
                raise ValueError(f"no table for operation {op}")
            for args in itertools.product(carrier, repeat=k):
                if table.get(args) not in set(carrier):
                    raise ValueError(f"{op}{args} is undefined or leaves the carrier")

    def __eq__(self, other):
        if not isinstance(other, ThresholdStructure):
            return NotImplemented
        return (
            self.signature.symbols == other.signature.symbols
            and self.carrier == other.carrier
            and {op: dict(t) for op, t in self.operations.items()} == {op: dict(t) for op, t in other.operations.items()}
            and dict(self.relation) == dict(other.relation)
        )

    __hash__ = None

    def entry(self, a, b) -> Entry:
        return self.relation[(a, b)]

    def apply(self, op, *args):
        return self.operations[op][tuple(args)]

    def holds(self, a, b, eps) -> bool:
        return entry_contains(self.relation[(a, b)], eps)

    def renamed(self, name: str) -> ThresholdStructure:
        return ThresholdStructure(self.signature, self.carrier, self.operations, self.relation, name)


def to_qfo(A: QuantitativeAlgebra, name: str | None = None) -> ThresholdStructure:
    rel = {(a, b): (None if is_inf(A.d(a, b)) else Threshold(A.d(a, b), True)) for a in A.carrier for b in A.carrier}
    ops = {op: dict(t) for op, t in A.operations.items()}
    return ThresholdStructure(A.signature, A.carrier, ops, rel, A.name if name is None else name)


def check_qfo_axioms(M: ThresholdStructure, limit: int = 10) -> dict[int, list[str]]:
    """Witness lists for axioms (1)-(6); an empty list means the axiom holds."""
    out: dict[int, list[str]] = {k: [] for k in range(1, 7)}
    C = M.carrier

    def note(k, msg):
        if len(out[k]) < limit:
            out[k].append(msg)

    for a in C:
        for b in C:
            e = M.entry(a, b)
            if a == b and not entry_contains(e, 0):
                note(1, f"{a} =_0 {a} fails ({fmt_entry(e)})")
            if a != b and entry_contains(e, 0):
                note(1, f"{a} =_0 {b} holds for distinct elements")
            if M.entry(b, a) != e:
                note(2, f"({a},{b}) is {fmt_entry(e)} but ({b},{a}) is {fmt_entry(M.entry(b, a))}")
            if e is not None and not e.closed:
                note(6, f"({a},{b}) has an open threshold at {fmt_bound(e.bound)}")
    for a, m, b in itertools.product(C, repeat=3):
        via = compose_entries(M.entry(a, m), M.entry(m, b))
        if not entry_subset(via, M.entry(a, b)):
            note(3, f"{a},{m},{b}: composite {fmt_entry(via)} exceeds {fmt_entry(M.entry(a, b))}")
    for op, k in M.signature.symbols:
        tuples = list(itertools.product(C, repeat=k))
        for x in tuples:
            for y in tuples:
                need = intersect(M.entry(u, v) for u, v in zip(x, y))
                got = M.entry(M.apply(op, *x), M.apply(op, *y))
                if not entry_subset(need, got):
                    note(5, f"{op}{x} vs {op}{y}: arguments {fmt_entry(need)} but images {fmt_entry(got)}")
    return out


def passes_all(M: ThresholdStructure) -> bool:
    return not any(check_qfo_axioms(M, limit=1).values())


def to_algebra(M: ThresholdStructure, name: str | None = None) -> QuantitativeAlgebra:
    from .extended import INF

    failures = check_qfo_axioms(M)
    if any(failures.values()):
        raise QFOAxiomError(failures)
    dist = {k: (INF if e is None else e.bound) for k, e in M.relation.items()}
    ops = {op: dict(t) for op, t in M.operations.items()}
    return QuantitativeAlgebra(M.signature, M.carrier, ops, dist, M.name if name is None else name)


# ---------------------------------------------------------------------------
# filters, reduced products, subobjects


@dataclass(frozen=True)
class FilterSpec:
    """Principal filter ``{S ⊆ range(index_count) | generator ⊆ S}``."""

    index_count: int
    generator: frozenset

    def __init__(self, index_count: int, generator: Iterable[int]):
        gen = frozenset(generator)
        if not gen:
            raise ValueError("empty generator: the filter would be improper")
        if not gen <= set(range(index_count)):
            raise ValueError(f"generator {sorted(gen)} is not a subset of the index set 0..{index_count - 1}")
        object.__setattr__(self, "index_count", index_count)
        object.__setattr__(self, "generator", gen)

    def __contains__(self, S) -> bool:
        return self.generator <= set(S)

    @classmethod
    def full(cls, n: int) -> FilterSpec:
        return cls(n, range(n))


def reduced_product(Ms: Sequence[ThresholdStructure], F: FilterSpec, name: str = "") -> ThresholdStructure:
    """Reduced product for a principal filter.

    Classes are represented by tuples whose coordinates outside the
    generator are pinned to the first element of the factor."""
    Ms = list(Ms)
    if len(Ms) != F.index_count:
        raise ValueError(f"{len(Ms)} factors but the filter has {F.index_count} indices")
    sig = Ms[0].signature
    for M in Ms:
        if M.signature.symbols != sig.symbols:
            raise ValueError("factors have different signatures")
        if not M.carrier:
            raise ValueError("factors must be nonempty")
    J = sorted(F.generator)

    def canon(t):
        return tuple(x if i in F.generator else Ms[i].carrier[0] for i, x in enumerate(t))

    axes = [M.carrier if i in F.generator else (M.carrier[0],) for i, M in enumerate(Ms)]
    carrier = tuple(itertools.product(*axes))
    ops = {}
    for op, k in sig.symbols:
        ops[op] = {
            args: canon(tuple(M.apply(op, *(a[i] for a in args)) for i, M in enumerate(Ms)))
            for args in itertools.product(carrier, repeat=k)
        }
    rel = {(a, b): intersect(Ms[i].entry(a[i], b[i]) for i in J) for a in carrier for b in carrier}
    return ThresholdStructure(sig, carrier, ops, rel, name)


def structure_product(Ms: Sequence[ThresholdStructure], name: str = "") -> ThresholdStructure:
    return reduced_product(Ms, FilterSpec.full(len(Ms)), name)


class SubobjectError(ValueError):
    pass


def subobject(M: ThresholdStructure, S: Iterable, name: str = "") -> ThresholdStructure:
    keep = set(S)
    for a in keep:
        if (a, a) not in M.relation:
            raise SubobjectError(f"{a!r} is not an element")
    members = [a for a in M.carrier if a in keep]
    for op, k in M.signature.symbols:
        for args in itertools.product(members, repeat=k):
            v = M.apply(op, *args)
            if v not in keep:
                raise SubobjectError(f"not closed under {op}: {op}{args} = {v!r} escapes")
    ops = {op: {args: M.apply(op, *args) for args in itertools.product(members, repeat=k)} for op, k in M.signature.symbols}
    rel = {(a, b): M.entry(a, b) for a in members for b in members}
    return ThresholdStructure(M.signature, tuple(members), ops, rel, name)


def embedding(M: ThresholdStructure, N: ThresholdStructure, *, bijective: bool = False) -> dict | None:
    """An injective map ``M -> N`` commuting with operations and preserving
    every threshold entry exactly, or ``None``."""
    if M.signature.symbols != N.signature.symbols:
        return None
    if len(M.carrier) > len(N.carrier) or (bijective and len(M.carrier) != len(N.carrier)):
        return None
    src = list(M.carrier)
    chosen: dict = {}
    used: set = set()

    def consistent() -> bool:
        dom = list(chosen)
        for op, k in M.signature.symbols:
            for args in itertools.product(dom, repeat=k):
                v = M.apply(op, *args)
                if v in chosen and chosen[v] != N.apply(op, *(chosen[a] for a in args)):
                    return False
        return True

    def extend(i):
        if i == len(src):
            return True
        a = src[i]
        for b in N.carrier:
            if b in used or M.entry(a, a) != N.entry(b, b):
                continue
            if any(M.entry(a, x) != N.entry(b, chosen[x]) or M.entry(x, a) != N.entry(chosen[x], b) for x in chosen):
                continue
            chosen[a] = b
            used.add(b)
            if consistent() and extend(i + 1):
                return True
            del chosen[a]
            used.discard(b)
        return False

    return dict(chosen) if extend(0) else None


def is_isomorphic(M: ThresholdStructure, N: ThresholdStructure) -> bool:
    return embedding(M, N, bijective=True) is not None


def is_subreduced_product(candidate: ThresholdStructure, Ms: Sequence[ThresholdStructure], F: FilterSpec) -> bool:
    if not passes_all(candidate):
        return False
    # a homomorphic injective image is automatically operation-closed
    return embedding(candidate, reduced_product(Ms, F)) is not None


# ---------------------------------------------------------------------------
# universal Horn formulas


@dataclass(frozen=True)
class TermEquality:
    left: Term
    right: Term

    def __str__(self):
        return f"{self.left} = {self.right}"

    def variables(self) -> set[str]:
        return variables_of(self.left) | variables_of(self.right)


Atom = Union[TermEquality, QuantEq]


@dataclass(frozen=True)
class HornFormula:
    """``forall variables . body_1 & ... & body_n -> head``."""

    variables: tuple[str, ...]
    body: tuple
    head: object

    def __init__(self, variables: Iterable[str], body: Iterable[Atom], head: Atom):
        variables = tuple(variables)
        body = tuple(body)
        if len(set(variables)) != len(variables):
            raise ValueError("repeated quantified variable")
        free = set()
        for a in (*body, head):
            free |= a.variables()
        stray = free - set(variables)
        if stray:
            raise ValueError(f"unquantified variables {sorted(stray)}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "head", head)

    def __str__(self):
        head = f"({self.head})"
        if self.body:
            head = " & ".join(f"({a})" for a in self.body) + " -> " + head
        return f"forall {' '.join(self.variables)} . {head}"


class HornEvaluationError(ValueError):
    pass


def _eval_term(M: ThresholdStructure, nu: Mapping[str, object], t: Term):
    if isinstance(t, Var):
        try:
            return nu[t.name]
        except KeyError:
            raise HornEvaluationError(f"unbound variable {t.name}") from None
    return M.apply(t.op, *(_eval_term(M, nu, a) for a in t.args))


def _atom_holds(M, nu, atom) -> bool:
    if isinstance(atom, TermEquality):
        return _eval_term(M, nu, atom.left) == _eval_term(M, nu, atom.right)
    return M.holds(_eval_term(M, nu, atom.left), _eval_term(M, nu, atom.right), atom.bound)


def horn_counterexample(M: ThresholdStructure, phi: HornFormula) -> dict | None:
    for values in itertools.product(M.carrier, repeat=len(phi.variables)):
        nu = dict(zip(phi.variables, values))
        if all(_atom_holds(M, nu, a) for a in phi.body) and not _atom_holds(M, nu, phi.head):
            return nu
    return None


def eval_horn(M: ThresholdStructure, phi: HornFormula) -> bool:
    return horn_counterexample(M, phi) is None


def horn_of_conditional(ce: ConditionalEquation) -> HornFormula:
    return HornFormula(ce.variables(), ce.sorted_hypotheses(), ce.conclusion)


def conditional_of_horn(phi: HornFormula) -> ConditionalEquation:
    """Inverse translation; a term equality ``s = t`` becomes ``s =_0 t``."""

    def conv(a):
        if isinstance(a, TermEquality):
            return QuantEq(a.left, a.right, 0)
        if isinstance(a, QuantEq):
            return a
        raise TypeError(f"atom {a!r} has no conditional-equation form")

    return ConditionalEquation([conv(a) for a in phi.body], conv(phi.head))
