"""Seeded random generators and vectorised exhaustive algebra families used
by the property suites."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import QuantitativeAlgebra, default_labels, metrics_on
from .equations import ConditionalEquation, QuantEq
from .extended import INF, is_inf
from .terms import App, Signature, Term, Var

BOUNDS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))
GRID = (Fraction(1, 2), Fraction(1), Fraction(2), INF)

INF32 = np.int32(1 << 30)


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for a named sub-stream of ``seed``."""
    return np.random.default_rng([seed, *stream])


def pick(rng: np.random.Generator, seq: Sequence):
    return seq[int(rng.integers(len(seq)))]


# ---------------------------------------------------------------------------
# terms and equations


def random_term(rng, sig: Signature, variables: Sequence[str], depth: int) -> Term:
    leaves = [Var(x) for x in variables] + [App(op) for op, k in sig.symbols if k == 0]
    compound = [(op, k) for op, k in sig.symbols if k > 0]
    if depth == 0 or not compound or rng.random() < 0.35:
        return pick(rng, leaves)
    op, k = pick(rng, compound)
    return App(op, [random_term(rng, sig, variables, depth - 1) for _ in range(k)])


def random_eq(rng, sig, variables, depth, bounds=BOUNDS) -> QuantEq:
    return QuantEq(random_term(rng, sig, variables, depth), random_term(rng, sig, variables, depth), pick(rng, bounds))


def random_var_eq(rng, variables, bounds=BOUNDS) -> QuantEq:
    x, y = rng.choice(len(variables), size=2, replace=len(variables) < 2)
    return QuantEq(Var(variables[x]), Var(variables[y]), pick(rng, bounds))


def random_conditional(rng, sig, variables, *, max_hyps=2, depth=2, basic=False, bounds=BOUNDS) -> ConditionalEquation:
    n = int(rng.integers(max_hyps + 1))
    if basic:
        hyps = [random_var_eq(rng, variables, bounds) for _ in range(n)]
    else:
        hyps = [random_eq(rng, sig, variables, 1) for _ in range(n)]
    return ConditionalEquation(hyps, random_eq(rng, sig, variables, depth, bounds))


# ---------------------------------------------------------------------------
# algebras


def random_metric(rng, n: int, grid=GRID) -> dict:
    while True:
        d = {(i, i): Fraction(0) for i in range(n)}
        for i, j in itertools.combinations(range(n), 2):
            d[(i, j)] = d[(j, i)] = pick(rng, grid)
        if all(d[(i, k)] <= d[(i, j)] + d[(j, k)] for i, j, k in itertools.permutations(range(n), 3)):
            return d


def random_nonexpansive_table(rng, n: int, k: int, d) -> dict:
    """Randomised depth-first search; constant tables always succeed, so a
    complete table is always found."""
    tuples = list(itertools.product(range(n), repeat=k))
    assigned: dict = {}

    def extend(i):
        if i == len(tuples):
            return True
        p = tuples[i]
        for v in rng.permutation(n):
            v = int(v)
            ok = all(d[(v, w)] <= max((d[(a, b)] for a, b in zip(p, q)), default=Fraction(0)) for q, w in assigned.items())
            if ok:
                assigned[p] = v
                if extend(i + 1):
                    return True
                del assigned[p]
        return False

    extend(0)
    return assigned


def random_algebra(rng, sig: Signature, n: int, grid=GRID, name: str = "") -> QuantitativeAlgebra:
    labels = default_labels(n)
    d = random_metric(rng, n, grid)
    ops = {}
    for op, k in sig.symbols:
        table = random_nonexpansive_table(rng, n, k, d)
        ops[op] = {tuple(labels[i] for i in args): labels[v] for args, v in table.items()}
    dist = {(labels[i], labels[j]): v for (i, j), v in d.items()}
    return QuantitativeAlgebra(sig, tuple(labels), ops, dist, name)


def random_congruence(rng, A: QuantitativeAlgebra, merges: int | None = None) -> list[tuple]:
    """Congruence generated by a few random pairs (union-find closure)."""
    n = len(A.carrier)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
            return True
        return False

    merges = int(rng.integers(n)) if merges is None else merges
    for _ in range(merges):
        union(int(rng.integers(n)), int(rng.integers(n)))
    idx = A.index
    changed = True
    while changed:
        changed = False
        for op, k in A.signature.symbols:
            tuples = list(itertools.product(range(n), repeat=k))
            for p in tuples:
                for q in tuples:
                    if all(find(a) == find(b) for a, b in zip(p, q)):
                        u = idx[A.apply(op, *(A.carrier[i] for i in p))]
                        v = idx[A.apply(op, *(A.carrier[i] for i in q))]
                        changed |= union(u, v)
    classes: dict[int, list] = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(A.carrier[i])
    return [tuple(c) for c in classes.values()]


# ---------------------------------------------------------------------------
# exhaustive families as stacked numpy arrays


@dataclass
class Family:
    """All valid algebras on ``range(n)`` for a signature and distance grid.

    ``ops[op]`` has shape ``(N, n, ..., n)`` and ``dist`` shape ``(N, n, n)``
    holding distances times ``scale`` (``INF32`` for infinity)."""

    signature: Signature
    n: int
    scale: int
    ops: dict[str, np.ndarray]
    dist: np.ndarray

    def __len__(self):
        return self.dist.shape[0]

    def algebra(self, i: int) -> QuantitativeAlgebra:
        labels = default_labels(self.n)
        ops = {}
        for op, k in self.signature.symbols:
            arr = self.ops[op][i]
            ops[op] = {tuple(labels[a] for a in args): labels[int(arr[args])] for args in itertools.product(range(self.n), repeat=k)}
        dist = {}
        for a in range(self.n):
            for b in range(self.n):
                v = int(self.dist[i, a, b])
                dist[(labels[a], labels[b])] = INF if v == INF32 else Fraction(v, self.scale)
        return QuantitativeAlgebra(self.signature, tuple(labels), ops, dist)


def table_stack(n: int, k: int, dm: np.ndarray) -> np.ndarray:
    """Every non-expansive ``k``-ary table under the scaled metric ``dm``,
    shape ``(T, n**k)`` in row-major argument order."""
    tuples = list(itertools.product(range(n), repeat=k))
    if k == 0:
        return np.arange(n, dtype=np.int8).reshape(n, 1)
    m = len(tuples)
    lim = np.array([[max(dm[a, b] for a, b in zip(p, q)) for q in tuples] for p in tuples], dtype=np.int64)
    partial = np.zeros((1, 0), dtype=np.int8)
    for i in range(m):
        rows = np.repeat(partial, n, axis=0)
        col = np.tile(np.arange(n, dtype=np.int8), partial.shape[0])
        if i:
            ok = np.all(dm[col[:, None], rows] <= lim[i, :i][None, :], axis=1)
            rows, col = rows[ok], col[ok]
        partial = np.concatenate([rows, col[:, None]], axis=1)
    assert partial.shape[1] == m
    return partial


def build_family(sig: Signature, n: int, grid=GRID, scale: int = 2) -> Family:
    ops_parts = {op: [] for op, _ in sig.symbols}
    dists = []
    for d in metrics_on(n, grid):
        dm = np.zeros((n, n), dtype=np.int64)
        for (a, b), v in d.items():
            dm[a, b] = INF32 if is_inf(v) else int(v * scale)
        stacks = [table_stack(n, k, dm) for _, k in sig.symbols]
        counts = [s.shape[0] for s in stacks]
        total = int(np.prod(counts)) if counts else 1
        for (op, k), s, idx in zip(sig.symbols, stacks, _product_indices(counts)):
            ops_parts[op].append(s[idx].reshape((-1,) + (n,) * k))
        dists.append(np.broadcast_to(dm.astype(np.int32), (total, n, n)))
    ops = {op: np.concatenate(parts) for op, parts in ops_parts.items()}
    return Family(sig, n, scale, ops, np.concatenate(dists))


def _product_indices(counts):
    if not counts:
        return []
    grids = np.meshgrid(*[np.arange(c) for c in counts], indexing="ij")
    return [g.ravel() for g in grids]


def family_eval(fam: Family, t: Term, cols: dict[str, np.ndarray], cache: dict) -> np.ndarray:
    """Values of ``t`` for every algebra and assignment, shape ``(N, M)``."""
    if t in cache:
        return cache[t]
    N = len(fam)
    if isinstance(t, Var):
        out = np.broadcast_to(cols[t.name][None, :], (N, cols[t.name].shape[0]))
    else:
        arr = fam.ops[t.op]
        rows = np.arange(N)[:, None]
        if not t.args:
            M = next(iter(cols.values())).shape[0] if cols else 1
            out = np.broadcast_to(arr[:, None] if arr.ndim == 1 else arr.reshape(N, 1), (N, M))
        else:
            args = [family_eval(fam, a, cols, cache) for a in t.args]
            out = arr[(rows, *args)]
    cache[t] = out
    return out


def assignment_cols(n: int, names: Sequence[str]) -> dict[str, np.ndarray]:
    if not names:
        return {}
    grids = np.meshgrid(*[np.arange(n, dtype=np.int8)] * len(names), indexing="ij")
    return {x: g.ravel() for x, g in zip(names, grids)}


# ---------------------------------------------------------------------------
# surjective homomorphisms


def scaled_copy(A: QuantitativeAlgebra, factor) -> QuantitativeAlgebra:
    dist = {k: (v if is_inf(v) else v * factor) for k, v in A.distance.items()}
    return QuantitativeAlgebra(A.signature, A.carrier, A.operations, dist, A.name)


def shortest_path_quotient_metric(A: QuantitativeAlgebra, classes) -> dict | None:
    """Largest pseudometric below ``d^A`` that vanishes on ``classes``,
    returned on class representatives; ``None`` if it is not non-expansive."""
    from .algebra import validate_algebra

    which = {a: c[0] for c in classes for a in c}
    reps = [c[0] for c in classes]
    pts = list(A.carrier)
    d = {(a, b): (Fraction(0) if which[a] == which[b] else A.d(a, b)) for a in pts for b in pts}
    for k in pts:
        for i in pts:
            for j in pts:
                if d[(i, k)] + d[(k, j)] < d[(i, j)]:
                    d[(i, j)] = d[(i, k)] + d[(k, j)]
    ops = {op: {tuple(which[a] for a in args): which[v] for args, v in t.items()} for op, t in A.operations.items()}
    Q = QuantitativeAlgebra(A.signature, tuple(reps), ops, {(a, b): d[(a, b)] for a in reps for b in reps})
    return None if validate_algebra(Q) else Q


def random_surjection(rng, sig: Signature, max_carrier: int = 3):
    """A surjective homomorphism drawn from one of three constructions:
    a product projection, a metric quotient by a congruence, or the identity
    onto a copy with halved distances.  Returns ``(kind, h)``."""
    from .algebra import Homomorphism
    from .constructions import direct_product

    while True:
        kind = pick(rng, ("projection", "quotient", "shrink"))
        if kind == "projection":
            C = random_algebra(rng, sig, int(rng.integers(1, max_carrier + 1)))
            D = random_algebra(rng, sig, int(rng.integers(1, 3)))
            B = direct_product([C, D], sig)
            return kind, Homomorphism(B, C, {b: b[0] for b in B.carrier})
        if kind == "quotient":
            B = random_algebra(rng, sig, int(rng.integers(1, max_carrier + 1)))
            classes = random_congruence(rng, B)
            C = shortest_path_quotient_metric(B, classes)
            if C is None:
                continue
            which = {a: c[0] for c in classes for a in c}
            return kind, Homomorphism(B, C, {b: which[b] for b in B.carrier})
        C = random_algebra(rng, sig, int(rng.integers(1, max_carrier + 1)))
        B = scaled_copy(C, 2)
        return kind, Homomorphism(B, C, {b: b for b in B.carrier})
