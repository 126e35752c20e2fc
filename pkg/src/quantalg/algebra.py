"""Finite quantitative algebras, satisfaction, homomorphisms and reflexivity."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .equations import ConditionalEquation, QuantEq
from .extended import INF, Bound, as_bound, bound_lcm, fmt_bound, is_inf
from .terms import Signature, Term, Var

# scaled integer stand-in for an infinite distance; far above any finite sum
# that occurs at desk scale
INF_INT = 1 << 60

DEFAULT_ASSIGNMENT_BUDGET = 2_000_000


class InvalidAlgebra(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations[:5]) + (" ..." if len(violations) > 5 else ""))
        self.violations = violations


class EvaluationError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


Element = Hashable


@dataclass(frozen=True, eq=False)
class QuantitativeAlgebra:
    """A finite algebra on an extended metric space.

    ``operations[f]`` maps argument tuples to elements; ``distance`` holds
    every ordered pair of the carrier.  Use :meth:`build` for the convenient
    constructor; the raw constructor performs no validation.
    """

    signature: Signature
    carrier: tuple
    operations: Mapping[str, Mapping[tuple, Element]]
    distance: Mapping[tuple, Bound]
    name: str = ""

    @classmethod
    def build(
        cls,
        signature: Signature,
        carrier: Iterable[Element],
        operations: Mapping[str, Mapping[tuple, Element] | Callable] | None = None,
        distance: Mapping[tuple, Any] | Callable | None = None,
        name: str = "",
    ) -> QuantitativeAlgebra:
        """Normalise tables.  Operations may be callables; constants may be
        given as a bare element.  Distances may list each unordered pair once;
        the diagonal defaults to 0 and a callable is evaluated on all pairs.
        Missing entries raise :class:`InvalidAlgebra`."""
        carrier = tuple(carrier)
        operations = dict(operations or {})
        ops: dict[str, dict[tuple, Element]] = {}
        problems = []
        for op, k in signature.symbols:
            spec = operations.pop(op, None)
            if spec is None:
                if carrier:
                    problems.append(f"operation {op} has no table")
                ops[op] = {}
                continue
            if callable(spec):
                ops[op] = {args: spec(*args) for args in itertools.product(carrier, repeat=k)}
            elif k == 0 and not isinstance(spec, Mapping):
                ops[op] = {(): spec}
            else:
                ops[op] = {tuple(a) if isinstance(a, tuple) else (a,): v for a, v in spec.items()}
        if operations:
            problems.append(f"tables for unknown symbols {sorted(operations)}")
        dist: dict[tuple, Bound] = {}
        for a in carrier:
            for b in carrier:
                if callable(distance):
                    v = distance(a, b)
                elif distance is not None and (a, b) in distance:
                    v = distance[(a, b)]
                    if (b, a) in distance and as_bound(distance[(b, a)]) != as_bound(v):
                        problems.append(f"asymmetric distance for {a}, {b}")
                elif distance is not None and (b, a) in distance:
                    v = distance[(b, a)]
                elif a == b:
                    v = 0
                else:
                    problems.append(f"missing distance for pair {a} {b}")
                    continue
                dist[(a, b)] = as_bound(v)
        if problems:
            raise InvalidAlgebra(problems)
        return cls(signature, carrier, ops, dist, name)

    @classmethod
    def discrete(cls, signature, carrier, operations=None, name="") -> QuantitativeAlgebra:
        """The 0/1 metric: every pair of distinct elements at distance 1."""
        return cls.build(signature, carrier, operations, lambda a, b: 0 if a == b else 1, name)

    def __len__(self):
        return len(self.carrier)

    def __eq__(self, other):
        if not isinstance(other, QuantitativeAlgebra):
            return NotImplemented
        return (
            self.signature.symbols == other.signature.symbols
            and self.carrier == other.carrier
            and {k: dict(v) for k, v in self.operations.items()} == {k: dict(v) for k, v in other.operations.items()}
            and dict(self.distance) == dict(other.distance)
        )

    def __hash__(self):
        return hash((self.signature.symbols, self.carrier))

    def d(self, a, b) -> Bound:
        return self.distance[(a, b)]

    def apply(self, op: str, *args):
        try:
            return self.operations[op][tuple(args)]
        except KeyError:
            raise EvaluationError(f"{op}{args} is undefined") from None

    def renamed(self, name: str) -> QuantitativeAlgebra:
        return QuantitativeAlgebra(self.signature, self.carrier, self.operations, self.distance, name)

    @cached_property
    def index(self) -> dict:
        return {a: k for k, a in enumerate(self.carrier)}

    @cached_property
    def scale(self) -> int:
        return bound_lcm(self.distance.values())

    @cached_property
    def op_arrays(self) -> dict[str, np.ndarray]:
        n = len(self.carrier)
        idx = self.index
        out = {}
        for op, k in self.signature.symbols:
            arr = np.zeros((n,) * k, dtype=np.int64)
            for args, v in self.operations[op].items():
                arr[tuple(idx[a] for a in args)] = idx[v]
            out[op] = arr
        return out

    def scaled_distances(self, scale: int) -> np.ndarray:
        """Distance matrix times ``scale`` as int64, ``INF_INT`` for infinity."""
        if scale % self.scale:
            raise ValueError(f"scale {scale} is not a multiple of {self.scale}")
        n = len(self.carrier)
        out = np.zeros((n, n), dtype=np.int64)
        for (a, b), v in self.distance.items():
            out[self.index[a], self.index[b]] = INF_INT if is_inf(v) else int(v * scale)
        return out


def validate_algebra(A: QuantitativeAlgebra, limit: int = 10) -> list[str]:
    """Every violated invariant (empty list means ``A`` is valid)."""
    out: list[str] = []
    carrier = A.carrier
    if len(set(carrier)) != len(carrier):
        return ["carrier has duplicate elements"]
    cset = set(carrier)
    for op, k in A.signature.symbols:
        table = A.operations.get(op)
        if table is None:
            out.append(f"operation {op} has no table")
            continue
        for args in itertools.product(carrier, repeat=k):
            if args not in table:
                out.append(f"{op}{args} undefined")
            elif table[args] not in cset:
                out.append(f"{op}{args} = {table[args]!r} is outside the carrier")
        extra = set(table) - set(itertools.product(carrier, repeat=k))
        if extra:
            out.append(f"{op} has entries outside the carrier: {sorted(map(str, extra))[:3]}")
    if not carrier and any(k == 0 for _, k in A.signature.symbols):
        out.append("void algebra cannot interpret constants")
    for a in carrier:
        for b in carrier:
            if (a, b) not in A.distance:
                out.append(f"missing distance for pair {a} {b}")
    if out:
        return out
    for a in carrier:
        if A.d(a, a) != 0:
            out.append(f"d({a},{a}) = {fmt_bound(A.d(a, a))} is not 0")
    for a, b in itertools.combinations(carrier, 2):
        if A.d(a, b) == 0:
            out.append(f"d({a},{b}) = 0 for distinct elements")
        if A.d(a, b) != A.d(b, a):
            out.append(f"d({a},{b}) != d({b},{a})")
    for a, b, c in itertools.product(carrier, repeat=3):
        if A.d(a, c) > A.d(a, b) + A.d(b, c):
            out.append(f"triangle fails: d({a},{c}) > d({a},{b}) + d({b},{c})")
            if len(out) >= limit:
                return out
    if out:
        return out
    out.extend(nonexpansive_violations(A, limit))
    return out


def nonexpansive_violations(A: QuantitativeAlgebra, limit: int = 10) -> list[str]:
    n = len(A.carrier)
    if n == 0:
        return []
    scale = A.scale
    D = A.scaled_distances(scale)
    out = []
    for op, k in A.signature.symbols:
        if k == 0:
            continue
        tuples = np.array(list(itertools.product(range(n), repeat=k)), dtype=np.int64)
        vals = A.op_arrays[op][tuple(tuples.T)]
        # argwise max distance between every pair of argument tuples
        dmax = np.zeros((len(tuples), len(tuples)), dtype=np.int64)
        for i in range(k):
            col = tuples[:, i]
            dmax = np.maximum(dmax, D[col[:, None], col[None, :]])
        dres = D[vals[:, None], vals[None, :]]
        bad = np.argwhere(dres > dmax)
        for p, q in bad[:limit]:
            a = tuple(A.carrier[i] for i in tuples[p])
            b = tuple(A.carrier[i] for i in tuples[q])
            out.append(
                f"{op} expands: d({op}{a}, {op}{b}) = {fmt_bound(A.d(A.carrier[vals[p]], A.carrier[vals[q]]))}"
                f" > {fmt_bound(max(A.d(x, y) for x, y in zip(a, b)))}"
            )
        if len(out) >= limit:
            break
    return out


def is_valid(A: QuantitativeAlgebra) -> bool:
    return not validate_algebra(A, limit=1)


def evaluate(A: QuantitativeAlgebra, alpha: Mapping[str, Element], t: Term):
    if isinstance(t, Var):
        try:
            return alpha[t.name]
        except KeyError:
            raise EvaluationError(f"variable {t.name} is unassigned") from None
    if t.op not in A.operations:
        raise EvaluationError(f"unknown symbol {t.op}")
    return A.apply(t.op, *(evaluate(A, alpha, a) for a in t.args))


def _evaluate_all(A: QuantitativeAlgebra, cols: dict[str, np.ndarray], t: Term, cache: dict) -> np.ndarray:
    """Vectorised evaluation: ``cols[x]`` holds the carrier index of ``x`` in
    every assignment."""
    hit = cache.get(t)
    if hit is not None:
        return hit
    if isinstance(t, Var):
        out = cols[t.name]
    else:
        if t.op not in A.op_arrays:
            raise EvaluationError(f"unknown symbol {t.op}")
        arr = A.op_arrays[t.op]
        if not t.args:
            size = len(next(iter(cols.values()))) if cols else 1
            out = np.full(size, int(arr), dtype=np.int64)
        else:
            out = arr[tuple(_evaluate_all(A, cols, a, cache) for a in t.args)]
    cache[t] = out
    return out


def _assignment_columns(n: int, names: Sequence[str], budget: int) -> dict[str, np.ndarray]:
    total = n ** len(names)
    if total > budget:
        raise BudgetExceeded(f"{total} assignments exceed the budget of {budget}")
    if not names:
        return {}
    grids = np.indices((n,) * len(names)).reshape(len(names), -1)
    return {x: grids[i] for i, x in enumerate(names)}


def violation_mask(A, ce: ConditionalEquation, budget: int = DEFAULT_ASSIGNMENT_BUDGET):
    """(variables, columns, mask) where ``mask`` flags the assignments that
    satisfy every hypothesis but break the conclusion."""
    names = ce.variables()
    n = len(A.carrier)
    cols = _assignment_columns(n, names, budget)
    size = n ** len(names)
    scale = np.lcm(A.scale, bound_lcm([h.bound for h in ce.hypotheses] + [ce.conclusion.bound]))
    scale = int(scale)
    D = A.scaled_distances(scale)
    cache: dict = {}
    ok = np.ones(size, dtype=bool)
    for h in ce.hypotheses:
        u = _evaluate_all(A, cols, h.left, cache)
        v = _evaluate_all(A, cols, h.right, cache)
        ok &= D[u, v] <= int(h.bound * scale)
    c = ce.conclusion
    s = _evaluate_all(A, cols, c.left, cache)
    t = _evaluate_all(A, cols, c.right, cache)
    ok &= D[s, t] > int(c.bound * scale)
    return names, cols, ok


def counterexample(A: QuantitativeAlgebra, ce: ConditionalEquation, budget: int = DEFAULT_ASSIGNMENT_BUDGET):
    """First violating assignment in canonical order, or ``None``."""
    if not A.carrier:
        return None
    names, cols, bad = violation_mask(A, ce, budget)
    if not bad.any():
        return None
    k = int(np.argmax(bad))
    return {x: A.carrier[int(cols[x][k])] for x in names}


def satisfies(A: QuantitativeAlgebra, ce: ConditionalEquation, budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    return counterexample(A, ce, budget) is None


def satisfies_theory(A: QuantitativeAlgebra, axioms: Iterable[ConditionalEquation], budget: int = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    return all(satisfies(A, ax, budget) for ax in axioms)


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Homomorphism:
    """A candidate homomorphism: carrier map from ``source`` to ``target``."""

    source: QuantitativeAlgebra
    target: QuantitativeAlgebra
    mapping: Mapping[Element, Element]

    def __call__(self, a):
        return self.mapping[a]

    def image(self) -> list:
        seen = set(self.mapping[a] for a in self.source.carrier)
        return [b for b in self.target.carrier if b in seen]

    def is_surjective(self) -> bool:
        return len(self.image()) == len(self.target.carrier)


def homomorphism_violations(h: Homomorphism, limit: int = 10) -> list[str]:
    S, T = h.source, h.target
    out = []
    if S.signature.symbols != T.signature.symbols:
        return ["source and target signatures differ"]
    for a in S.carrier:
        if a not in h.mapping:
            out.append(f"map undefined on {a}")
        elif h.mapping[a] not in T.index:
            out.append(f"{a} maps outside the target carrier")
    if out:
        return out
    for op, k in S.signature.symbols:
        for args in itertools.product(S.carrier, repeat=k):
            lhs = h.mapping[S.apply(op, *args)]
            rhs = T.apply(op, *(h.mapping[a] for a in args))
            if lhs != rhs:
                out.append(f"does not commute with {op} at {args}")
                if len(out) >= limit:
                    return out
    n = len(S.carrier)
    if n:
        scale = int(np.lcm(S.scale, T.scale))
        DS = S.scaled_distances(scale)
        DT = T.scaled_distances(scale)
        img = np.array([T.index[h.mapping[a]] for a in S.carrier], dtype=np.int64)
        bad = np.argwhere(DT[img[:, None], img[None, :]] > DS)
        for p, q in bad[:limit]:
            a, b = S.carrier[p], S.carrier[q]
            out.append(
                f"expands {a},{b}: {fmt_bound(T.d(h.mapping[a], h.mapping[b]))} > {fmt_bound(S.d(a, b))}"
            )
    return out


def is_homomorphism(h: Homomorphism) -> bool:
    return not homomorphism_violations(h, limit=1)


def reflexivity_failure(h: Homomorphism, c: int):
    """A subset of the image (of size ``< c``) with no isometric preimage
    selection, or ``None`` when ``h`` is ``c``-reflexive."""
    if c < 1:
        raise ValueError("c must be a positive integer")
    image = h.image()
    size = min(c - 1, len(image))
    if size < 2:
        # singletons and the empty set always lift: d(a,a) = 0 on both sides
        return None
    S, T = h.source, h.target
    fibers: dict = {b: [] for b in image}
    for a in S.carrier:
        fibers[h.mapping[a]].append(a)
    # a selection for a maximal subset restricts to every smaller one
    for subset in itertools.combinations(image, size):
        if not _isometric_selection(S, T, subset, fibers):
            return subset
    return None


def _isometric_selection(S, T, subset, fibers) -> bool:
    chosen: list = []

    def extend(k: int) -> bool:
        if k == len(subset):
            return True
        b = subset[k]
        for a in fibers[b]:
            if all(S.d(a, a2) == T.d(b, b2) for a2, b2 in zip(chosen, subset)):
                chosen.append(a)
                if extend(k + 1):
                    return True
                chosen.pop()
        return False

    return extend(0)


def is_c_reflexive(h: Homomorphism, c: int) -> bool:
    return reflexivity_failure(h, c) is None


def induced_subalgebra(A: QuantitativeAlgebra, subset: Iterable[Element], name: str = "") -> QuantitativeAlgebra:
    """Restriction of ``A`` to an operation-closed subset (carrier order kept)."""
    keep = set(subset)
    carrier = tuple(a for a in A.carrier if a in keep)
    ops = {}
    for op, k in A.signature.symbols:
        table = {}
        for args in itertools.product(carrier, repeat=k):
            v = A.apply(op, *args)
            if v not in keep:
                raise ValueError(f"subset is not closed under {op}: {op}{args} = {v}")
            table[args] = v
        ops[op] = table
    dist = {(a, b): A.d(a, b) for a in carrier for b in carrier}
    return QuantitativeAlgebra(A.signature, carrier, ops, dist, name)


def image_algebra(h: Homomorphism) -> QuantitativeAlgebra:
    return induced_subalgebra(h.target, h.image())


def congruence_to_pseudometric(A: QuantitativeAlgebra, classes: Iterable[Iterable[Element]]) -> dict[tuple, Fraction]:
    """The 0/1 pseudometric whose kernel is the given congruence."""
    blocks = [frozenset(c) for c in classes]
    which = {}
    for k, blk in enumerate(blocks):
        for a in blk:
            if a in which:
                raise ValueError(f"{a} lies in two classes")
            which[a] = k
    if set(which) != set(A.carrier):
        raise ValueError("classes do not partition the carrier")
    for op, k in A.signature.symbols:
        for args in itertools.product(A.carrier, repeat=k):
            for other in itertools.product(*(sorted(blocks[which[a]], key=A.index.get) for a in args)):
                if which[A.apply(op, *args)] != which[A.apply(op, *other)]:
                    raise ValueError(f"not a congruence for {op}: {args} vs {other}")
    return {(a, b): Fraction(0 if which[a] == which[b] else 1) for a in A.carrier for b in A.carrier}


# ---------------------------------------------------------------------------
# countermodel search


@dataclass
class Countermodel:
    algebra: QuantitativeAlgebra
    assignment: dict
    violated: QuantEq

    def __str__(self):
        rows = [f"{x} -> {v}" for x, v in self.assignment.items()]
        A, c = self.algebra, self.violated
        s = evaluate(A, self.assignment, c.left)
        t = evaluate(A, self.assignment, c.right)
        rows.append(f"d({c.left}, {c.right}) = {fmt_bound(A.d(s, t))} > {fmt_bound(c.bound)}")
        return "\n".join(rows)


def distance_grid(bounds: Iterable, carrier_size: int) -> list:
    """Sums of the positive input bounds using at most ``carrier_size**2``
    summands, plus ``INF``; sorted."""
    base = sorted({as_bound(b) for b in bounds if not is_inf(as_bound(b)) and as_bound(b) > 0})
    values = set()
    frontier = {Fraction(0)}
    for _ in range(max(1, carrier_size * carrier_size)):
        frontier = {f + b for f in frontier for b in base} - values
        if not frontier:
            break
        values |= frontier
    return sorted(values) + [INF]


def metrics_on(n: int, grid: Sequence) -> Iterable[dict]:
    """All metrics on ``range(n)`` with off-diagonal values from ``grid``."""
    pairs = list(itertools.combinations(range(n), 2))
    for values in itertools.product(grid, repeat=len(pairs)):
        d = {}
        for (i, j), v in zip(pairs, values):
            d[(i, j)] = d[(j, i)] = v
        for i in range(n):
            d[(i, i)] = Fraction(0)
        if all(d[(i, k)] <= d[(i, j)] + d[(j, k)] for i, j, k in itertools.permutations(range(n), 3)):
            yield d


def nonexpansive_tables(n: int, k: int, d: Mapping) -> list[dict]:
    """Every non-expansive ``k``-ary table on ``range(n)`` under metric ``d``."""
    tuples = list(itertools.product(range(n), repeat=k))
    if k == 0:
        return [{(): v} for v in range(n)]
    out = []
    limits = {(p, q): max(d[(a, b)] for a, b in zip(p, q)) for p in tuples for q in tuples}
    # backtracking over tuples with pairwise checks against assigned ones
    assigned: dict = {}

    def extend(i: int):
        if i == len(tuples):
            out.append(dict(assigned))
            return
        p = tuples[i]
        for v in range(n):
            if all(d[(v, w)] <= limits[(p, q)] for q, w in assigned.items()):
                assigned[p] = v
                extend(i + 1)
                del assigned[p]

    extend(0)
    return out


def enumerate_algebras(signature: Signature, n: int, grid: Sequence, labels: Sequence | None = None):
    """Every valid algebra on ``n`` points whose distances come from ``grid``."""
    labels = list(labels) if labels is not None else default_labels(n)
    for d in metrics_on(n, grid):
        per_op = [nonexpansive_tables(n, k, d) for _, k in signature.symbols]
        dist = {(labels[i], labels[j]): v for (i, j), v in d.items()}
        for combo in itertools.product(*per_op):
            ops = {
                op: {tuple(labels[i] for i in args): labels[v] for args, v in table.items()}
                for (op, _), table in zip(signature.symbols, combo)
            }
            yield QuantitativeAlgebra(signature, tuple(labels), ops, dist)


def default_labels(n: int) -> list[str]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return [letters[i] if n <= 26 else f"e{i}" for i in range(n)]


def search_countermodel(
    signature: Signature,
    hypotheses: Iterable[QuantEq],
    goal: QuantEq,
    max_carrier: int = 3,
    axioms: Iterable[ConditionalEquation] = (),
    budget: int = 200_000,
) -> Countermodel | None:
    """Smallest algebra (carrier size first, then grid order) that satisfies
    the axioms and has an assignment meeting the hypotheses but not ``goal``.
    ``None`` means the grid was exhausted; it is not a validity proof."""
    hypotheses = list(hypotheses)
    axioms = list(axioms)
    ce = ConditionalEquation(hypotheses, goal)
    for t in [goal.left, goal.right] + [u for h in hypotheses for u in h.terms()]:
        signature.check(t)
    bounds = [h.bound for h in hypotheses] + [goal.bound]
    examined = 0
    for n in range(1, max_carrier + 1):
        grid = distance_grid(bounds, n)
        for A in enumerate_algebras(signature, n, grid):
            examined += 1
            if examined > budget:
                raise BudgetExceeded(f"countermodel search examined more than {budget} algebras")
            if axioms and not satisfies_theory(A, axioms):
                continue
            alpha = counterexample(A, ce)
            if alpha is not None:
                return Countermodel(A, alpha, goal)
    return None
