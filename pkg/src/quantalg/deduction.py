"""Least derivable distance bounds and explicit proof objects.

The saturation engine closes a finite table of bounds over a term universe
``U`` under the deduction rules: hypotheses, reflexivity, symmetry, the
triangle rule, non-expansiveness of every operation, and instances of the
theory axioms whose terms all lie in ``U``.  Weakening (Max) and the
Archimedean rule are implicit: a table entry ``b`` for ``(s, t)`` means
``s =_e t`` is derivable for every ``e >= b``.

All bounds are sums of the input bounds, so the engine works on integers
scaled by the lcm of the input denominators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .equations import ConditionalEquation, QuantEq
from .extended import INF, Bound, bound_lcm, fmt_bound, is_inf
from .terms import (
    DEFAULT_TERM_CAP,
    App,
    Term,
    TermCapExceeded,
    Var,
    apply_substitution,
    subterm_closure,
    subterms,
    term_key,
)

RULES = ("Refl", "Symm", "Triang", "Max", "Arch", "NExp", "Subst", "Cut", "Assumpt")

DEFAULT_ROUND_GUARD = 10_000


class UniverseError(ValueError):
    pass


class SaturationGuardExceeded(RuntimeError):
    pass


def _eq_terms(eqs: Iterable[QuantEq]) -> list[Term]:
    return [t for e in eqs for t in (e.left, e.right)]


def _axiom_terms(ax: ConditionalEquation) -> list[Term]:
    return _eq_terms(ax.hypotheses) + [ax.conclusion.left, ax.conclusion.right]


def build_universe(
    hypotheses: Iterable[QuantEq],
    goal: QuantEq | None,
    axioms: Iterable[ConditionalEquation] = (),
    depth: int = 0,
    cap: int = DEFAULT_TERM_CAP,
) -> tuple[Term, ...]:
    """Finite arena for saturation.

    Starts from the subterm closure of the hypotheses and goal, then runs
    ``depth`` rounds that add (the subterms of) every axiom instance obtained
    by mapping axiom variables to terms already present.  Instances deeper
    than ``max(depth, deepest input term)`` are skipped.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    hypotheses = list(hypotheses)
    axioms = list(axioms)
    seeds = _eq_terms(hypotheses) + (list(goal.terms()) if goal is not None else [])
    universe = subterm_closure(seeds)
    depth_cap = max([depth] + [t.depth for t in universe])
    for _ in range(depth):
        current = sorted(universe, key=term_key)
        fresh: set[Term] = set()
        for ax in axioms:
            names = ax.variables()
            patterns = _axiom_terms(ax)
            if not names:
                candidates = [dict()]
            else:
                candidates = (dict(zip(names, combo)) for combo in itertools.product(current, repeat=len(names)))
            for sigma in candidates:
                for p in patterns:
                    inst = apply_substitution(sigma, p)
                    if inst.depth <= depth_cap and inst not in universe and inst not in fresh:
                        fresh |= subterms(inst) - universe
                if len(universe) + len(fresh) > cap:
                    raise TermCapExceeded(f"universe exceeds {cap} terms")
        if not fresh:
            break
        universe |= fresh
    return tuple(sorted(universe, key=term_key))


def _match(pattern: Term, term: Term, binding: dict[str, Term]) -> dict[str, Term] | None:
    if isinstance(pattern, Var):
        bound = binding.get(pattern.name)
        if bound is None:
            out = dict(binding)
            out[pattern.name] = term
            return out
        return binding if bound == term else None
    if not isinstance(term, App) or term.op != pattern.op or len(term.args) != len(pattern.args):
        return None
    for p, t in zip(pattern.args, term.args):
        binding = _match(p, t, binding)
        if binding is None:
            return None
    return binding


@dataclass(frozen=True)
class _Fact:
    i: int
    j: int
    value: int | float  # scaled bound
    rule: str
    data: tuple = ()


@dataclass
class DerivedDistanceTable:
    """Least derivable bound for every pair of terms in a finite universe."""

    universe: tuple[Term, ...]
    hypotheses: frozenset[QuantEq]
    axioms: tuple[ConditionalEquation, ...]
    scale: int
    _values: list[list] = field(repr=False)
    _facts: list[_Fact] | None = field(default=None, repr=False)
    _best: list[list[int]] | None = field(default=None, repr=False)
    rounds: int = 0

    def __post_init__(self):
        self.index = {t: k for k, t in enumerate(self.universe)}

    def _idx(self, t: Term) -> int:
        try:
            return self.index[t]
        except KeyError:
            raise UniverseError(f"term {t} is not in the universe") from None

    def _unscale(self, v) -> Bound:
        return INF if is_inf(v) else Fraction(v, self.scale)

    def bound(self, s: Term, t: Term) -> Bound:
        return self._unscale(self._values[self._idx(s)][self._idx(t)])

    def derivable(self, eq: QuantEq) -> bool:
        return self.bound(eq.left, eq.right) <= eq.bound

    def items(self):
        for a, s in enumerate(self.universe):
            for b, t in enumerate(self.universe):
                yield s, t, self._unscale(self._values[a][b])

    def as_dict(self) -> dict[tuple[Term, Term], Bound]:
        return {(s, t): v for s, t, v in self.items()}

    def proof(self, s: Term, t: Term, bound=None) -> Proof:
        """Explicit proof of ``hypotheses |- s =_b t`` for the table bound ``b``
        (or any larger ``bound``).  Requires a table built with ``record=True``."""
        if self._facts is None:
            raise ValueError("table was built without proof recording")
        b = self.bound(s, t)
        if is_inf(b):
            raise ValueError(f"no finite bound derivable for {s}, {t}")
        return _ProofBuilder(self).build(self._idx(s), self._idx(t), bound)


def least_derivable_distance(
    hypotheses: Iterable[QuantEq],
    axioms: Iterable[ConditionalEquation],
    universe: Sequence[Term],
    *,
    record: bool = False,
    round_guard: int = DEFAULT_ROUND_GUARD,
) -> DerivedDistanceTable:
    hypotheses = frozenset(hypotheses)
    axioms = tuple(axioms)
    terms = tuple(universe)
    index = {t: k for k, t in enumerate(terms)}
    if len(index) != len(terms):
        raise UniverseError("universe contains duplicate terms")
    for t in terms:
        if isinstance(t, App):
            for a in t.args:
                if a not in index:
                    raise UniverseError(f"universe is not subterm-closed: {a} (in {t}) missing")
    for h in hypotheses:
        for t in h.terms():
            if t not in index:
                raise UniverseError(f"hypothesis term {t} is not in the universe")

    scale = bound_lcm([h.bound for h in hypotheses] + [e.bound for ax in axioms for e in (*ax.hypotheses, ax.conclusion)])
    n = len(terms)
    d: list[list] = [[INF] * n for _ in range(n)]
    facts: list[_Fact] | None = [] if record else None
    best: list[list[int]] | None = [[-1] * n for _ in range(n)] if record else None

    def tighten(i: int, j: int, value, rule: str, data: tuple = ()) -> bool:
        if value >= d[i][j]:
            return False
        d[i][j] = d[j][i] = value
        if facts is not None:
            facts.append(_Fact(i, j, value, rule, data))
            best[i][j] = best[j][i] = len(facts) - 1
        return True

    for k in range(n):
        tighten(k, k, 0, "Refl")
    for h in sorted(hypotheses, key=QuantEq.sort_key):
        tighten(index[h.left], index[h.right], h.bound * scale, "Assumpt", (h,))

    # NExp candidates: pairs of applications of the same symbol
    by_op: dict[tuple[str, int], list[int]] = {}
    for k, t in enumerate(terms):
        if isinstance(t, App) and t.args:
            by_op.setdefault((t.op, len(t.args)), []).append(k)
    nexp_pairs = []
    for ks in by_op.values():
        for p, q in itertools.combinations(ks, 2):
            nexp_pairs.append((p, q, tuple((index[a], index[b]) for a, b in zip(terms[p].args, terms[q].args))))

    instances = _axiom_instances(axioms, terms, index, scale)

    rounds = 0
    changed = True
    while changed:
        rounds += 1
        if rounds > round_guard:
            raise SaturationGuardExceeded(f"no fixpoint after {round_guard} rounds")
        changed = False
        for k in range(n):
            dk = d[k]
            for i in range(n):
                dik = d[i][k]
                if is_inf(dik):
                    continue
                di = d[i]
                for j in range(i + 1, n):
                    v = dik + dk[j]
                    if v < di[j]:
                        data = (best[i][k], best[k][j], k) if best is not None else (k,)
                        tighten(i, j, v, "Triang", data)
                        changed = True
        for p, q, arg_pairs in nexp_pairs:
            v = max(d[a][b] for a, b in arg_pairs)
            if v < d[p][q]:
                data = tuple(best[a][b] for a, b in arg_pairs) if best is not None else ()
                changed |= tighten(p, q, v, "NExp", data)
        for ax_idx, sigma, hyp_pairs, (ci, cj), value in instances:
            if value < d[ci][cj] and all(d[a][b] <= e for a, b, e in hyp_pairs):
                data = (ax_idx, sigma, tuple(best[a][b] for a, b, _ in hyp_pairs) if best is not None else ())
                changed |= tighten(ci, cj, value, "Axiom", data)

    return DerivedDistanceTable(terms, hypotheses, axioms, scale, d, facts, best, rounds)


def _axiom_instances(axioms, terms, index, scale):
    """Every substitution instance of an axiom whose terms all lie in the universe."""
    out = []
    for ax_idx, ax in enumerate(axioms):
        concl = ax.conclusion
        hyps = ax.sorted_hypotheses()
        names = ax.variables()
        seen = set()
        for s in terms:
            b1 = _match(concl.left, s, {})
            if b1 is None:
                continue
            for t in terms:
                b2 = _match(concl.right, t, b1)
                if b2 is None:
                    continue
                free = [x for x in names if x not in b2]
                for combo in itertools.product(terms, repeat=len(free)):
                    sigma = dict(b2)
                    sigma.update(zip(free, combo))
                    key = tuple(sigma[x] for x in names)
                    if key in seen:
                        continue
                    seen.add(key)
                    hyp_pairs = []
                    for h in hyps:
                        u = apply_substitution(sigma, h.left)
                        v = apply_substitution(sigma, h.right)
                        if u not in index or v not in index:
                            break
                        hyp_pairs.append((index[u], index[v], h.bound * scale))
                    else:
                        frozen_sigma = tuple(sorted(sigma.items()))
                        out.append((ax_idx, frozen_sigma, tuple(hyp_pairs), (index[s], index[t]), concl.bound * scale))
    return out


def is_consistent_probe(
    axioms: Iterable[ConditionalEquation],
    x: str = "x",
    y: str = "y",
    depth: int = 1,
    cap: int = DEFAULT_TERM_CAP,
) -> bool:
    """False when ``|- x =_0 y`` is derivable within the budget.  True only
    means no inconsistency was found at this depth."""
    if x == y:
        raise ValueError("the probe needs two distinct variables")
    axioms = list(axioms)
    goal = QuantEq(Var(x), Var(y), 0)
    universe = build_universe((), goal, axioms, depth, cap)
    table = least_derivable_distance((), axioms, universe)
    return table.bound(Var(x), Var(y)) != 0


# ---------------------------------------------------------------------------
# proof objects


@dataclass(frozen=True)
class ProofStep:
    rule: str
    hypotheses: frozenset[QuantEq]
    conclusion: QuantEq
    premises: tuple[int, ...] = ()
    axiom: int | None = None
    substitution: tuple[tuple[str, Term], ...] = ()

    def __str__(self):
        return format_step(self)


@dataclass(frozen=True)
class Proof:
    steps: tuple[ProofStep, ...]

    @property
    def conclusion(self) -> ProofStep:
        return self.steps[-1]

    def __str__(self):
        return format_proof(self)


@dataclass(frozen=True)
class ProofVerdict:
    accepted: bool
    step: int | None = None
    code: str = "ok"
    message: str = ""

    def __bool__(self):
        return self.accepted


def format_step(step: ProofStep) -> str:
    parts = [step.rule]
    if step.premises:
        parts.append("[" + ",".join(str(p) for p in step.premises) + "]")
    if step.axiom is not None:
        parts.append(f"axiom {step.axiom}")
    if step.substitution:
        parts.append("{" + ", ".join(f"{x} := {t}" for x, t in step.substitution) + "}")
    hyps = " ; ".join(str(h) for h in sorted(step.hypotheses, key=QuantEq.sort_key))
    parts.append(f"[{hyps}] |- {step.conclusion}")
    return " ".join(parts)


def format_proof(proof: Proof) -> str:
    return "\n".join(f"{k}: {format_step(s)}" for k, s in enumerate(proof.steps))


def _sub(step_sigma, eq: QuantEq) -> QuantEq:
    return eq.substitute(dict(step_sigma))


def check_proof(proof: Proof | Sequence[ProofStep], axioms: Sequence[ConditionalEquation] = ()) -> ProofVerdict:
    """Accept iff every step is a correct rule instance; otherwise report the
    first failing step with an error code."""
    steps = proof.steps if isinstance(proof, Proof) else tuple(proof)
    axioms = tuple(axioms)
    for k, st in enumerate(steps):
        for p in st.premises:
            if not (0 <= p < k):
                return ProofVerdict(False, k, "dangling-premise", f"premise {p} is not an earlier step")
        prem = [steps[p] for p in st.premises]
        problem = _check_step(st, prem, axioms, steps)
        if problem is not None:
            code, msg = problem
            return ProofVerdict(False, k, code, msg)
    return ProofVerdict(True)


def _weaker(prem: ProofStep, st: ProofStep) -> bool:
    return prem.hypotheses <= st.hypotheses


def _check_step(st: ProofStep, prem: list[ProofStep], axioms, steps):
    c = st.conclusion
    rule = st.rule
    mismatch = ("rule-mismatch", f"{rule} does not yield {c}")
    if rule not in RULES:
        return ("unknown-rule", f"unknown rule {rule!r}")
    if rule in ("Symm", "Triang", "Max", "Arch", "NExp") and not all(_weaker(p, st) for p in prem):
        return ("side-condition", "premise hypotheses are not contained in the step's hypotheses")
    if rule == "Refl":
        if prem or c.left != c.right or c.bound != 0:
            return mismatch
    elif rule == "Assumpt":
        if prem or c not in st.hypotheses:
            return ("side-condition", f"{c} is not among the hypotheses")
    elif rule == "Symm":
        if len(prem) != 1 or prem[0].conclusion.flipped() != c:
            return mismatch
    elif rule == "Triang":
        if len(prem) != 2:
            return mismatch
        a, b = prem[0].conclusion, prem[1].conclusion
        if a.right != b.left or c.left != a.left or c.right != b.right:
            return mismatch
        if c.bound != a.bound + b.bound:
            return ("side-condition", f"bound {fmt_bound(c.bound)} is not {fmt_bound(a.bound)} + {fmt_bound(b.bound)}")
    elif rule == "Max":
        if len(prem) != 1:
            return mismatch
        a = prem[0].conclusion
        if (a.left, a.right) != (c.left, c.right):
            return mismatch
        if not c.bound > a.bound:
            return ("side-condition", "Max needs a strictly larger bound")
    elif rule == "Arch":
        if len(prem) != 1:
            return ("infinitary-arch", "Arch must cite a single prior derivation at a bound no larger than the conclusion's")
        a = prem[0].conclusion
        if (a.left, a.right) != (c.left, c.right):
            return mismatch
        if a.bound > c.bound:
            return ("infinitary-arch", "cited bound exceeds the conclusion; only the finite form of Arch is checkable")
    elif rule == "NExp":
        if not isinstance(c.left, App) or not isinstance(c.right, App):
            return mismatch
        if c.left.op != c.right.op or len(c.left.args) != len(prem) or len(c.right.args) != len(prem):
            return mismatch
        for p, u, v in zip(prem, c.left.args, c.right.args):
            e = p.conclusion
            if (e.left, e.right) != (u, v):
                return mismatch
            if e.bound != c.bound:
                return ("side-condition", "NExp premises must share the conclusion's bound")
    elif rule == "Subst":
        sigma = dict(st.substitution)
        if st.axiom is not None:
            if prem:
                return mismatch
            if not (0 <= st.axiom < len(axioms)):
                return ("dangling-premise", f"no axiom {st.axiom}")
            src_h, src_c = axioms[st.axiom].hypotheses, axioms[st.axiom].conclusion
        else:
            if len(prem) != 1:
                return mismatch
            src_h, src_c = prem[0].hypotheses, prem[0].conclusion
        if frozenset(h.substitute(sigma) for h in src_h) != st.hypotheses or src_c.substitute(sigma) != c:
            return mismatch
    elif rule == "Cut":
        if not prem:
            return mismatch
        main, side = prem[0], prem[1:]
        if main.conclusion != c:
            return mismatch
        covered = {p.conclusion for p in side if _weaker(p, st)}
        missing = [psi for psi in main.hypotheses if psi not in covered]
        if missing:
            return ("side-condition", f"Cut leaves {missing[0]} underived")
    return None


class _ProofBuilder:
    def __init__(self, table: DerivedDistanceTable):
        self.t = table
        self.steps: list[ProofStep] = []
        self.memo: dict[tuple[int, int, int], int] = {}
        self.gamma = table.hypotheses

    def eq(self, i, j, scaled) -> QuantEq:
        return QuantEq(self.t.universe[i], self.t.universe[j], Fraction(scaled, self.t.scale))

    def add(self, rule, conclusion, premises=(), hyps=None, axiom=None, substitution=()) -> int:
        self.steps.append(ProofStep(rule, self.gamma if hyps is None else hyps, conclusion, tuple(premises), axiom, substitution))
        return len(self.steps) - 1

    def lift(self, k: int, value) -> int:
        """Weaken step ``k`` to the scaled bound ``value`` with Max if needed."""
        c = self.steps[k].conclusion
        target = Fraction(value, self.t.scale)
        if c.bound == target:
            return k
        return self.add("Max", QuantEq(c.left, c.right, target), (k,))

    def fact(self, fid: int, i: int, j: int) -> int:
        key = (fid, i, j)
        if key in self.memo:
            return self.memo[key]
        f = self.t._facts[fid]
        if (f.i, f.j) != (i, j):
            k = self.add("Symm", self.eq(i, j, f.value), (self.fact(fid, f.i, f.j),))
        elif f.rule == "Refl":
            k = self.add("Refl", self.eq(i, i, 0))
        elif f.rule == "Assumpt":
            (h,) = f.data
            k = self.add("Assumpt", h)
        elif f.rule == "Triang":
            f1, f2, mid = f.data
            k = self.add("Triang", self.eq(i, j, f.value), (self.fact(f1, i, mid), self.fact(f2, mid, j)))
        elif f.rule == "NExp":
            s, t = self.t.universe[i], self.t.universe[j]
            prems = []
            for fa, a, b in zip(f.data, s.args, t.args):
                ia, ib = self.t.index[a], self.t.index[b]
                prems.append(self.lift(self.fact(fa, ia, ib), f.value))
            k = self.add("NExp", self.eq(i, j, f.value), prems)
        elif f.rule == "Axiom":
            ax_idx, sigma, hyp_facts = f.data
            ax = self.t.axioms[ax_idx]
            sub = dict(sigma)
            inst_hyps = [h.substitute(sub) for h in ax.sorted_hypotheses()]
            concl = ax.conclusion.substitute(sub)
            sk = self.add("Subst", concl, hyps=frozenset(inst_hyps), axiom=ax_idx, substitution=sigma)
            side = []
            for fh, h in zip(hyp_facts, inst_hyps):
                ih, jh = self.t.index[h.left], self.t.index[h.right]
                side.append(self.lift(self.fact(fh, ih, jh), h.bound * self.t.scale))
            k = self.add("Cut", concl, (sk, *side))
        else:  # pragma: no cover
            raise AssertionError(f"unknown fact rule {f.rule}")
        self.memo[key] = k
        return k

    def build(self, i: int, j: int, bound=None) -> Proof:
        fid = self.t._best[i][j]
        k = self.fact(fid, i, j)
        if bound is not None:
            target = Fraction(bound)
            have = self.steps[k].conclusion.bound
            if target < have:
                raise ValueError(f"bound {fmt_bound(target)} is below the least derivable {fmt_bound(have)}")
            if target > have:
                k = self.add("Max", QuantEq(self.t.universe[i], self.t.universe[j], target), (k,))
        return Proof(tuple(self.steps[: k + 1]))
