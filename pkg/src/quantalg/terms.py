"""Signatures, terms, substitutions and depth-bounded term enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class SignatureError(ValueError):
    pass


class TermCapExceeded(RuntimeError):
    """A term enumeration grew past its configured size cap."""


DEFAULT_TERM_CAP = 50_000


class Term:
    """Base class for :class:`Var` and :class:`App`.

    Terms are immutable and hash-consed only by structure; the hash is cached
    because terms are used heavily as dictionary keys.
    """

    __slots__ = ("_hash", "depth")

    def __lt__(self, other: Term) -> bool:
        return term_key(self) < term_key(other)


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.depth = 0
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class App(Term):
    __slots__ = ("op", "args")

    def __init__(self, op: str, args: Sequence[Term] = ()):
        self.op = op
        self.args = tuple(args)
        self.depth = 1 + max(a.depth for a in self.args) if self.args else 0
        self._hash = hash((op, self.args))

    def __eq__(self, other):
        return (
            isinstance(other, App)
            and other._hash == self._hash
            and other.op == self.op
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.op!r}, {self.args!r})"

    def __str__(self):
        if not self.args:
            return self.op
        return f"{self.op}({', '.join(str(a) for a in self.args)})"


def term_key(t: Term) -> tuple:
    """Total order: depth, then variables before applications, then name,
    then arguments lexicographically."""
    if isinstance(t, Var):
        return (0, 0, t.name)
    return (t.depth, 1, t.op, tuple(term_key(a) for a in t.args))


def var(name: str) -> Var:
    return Var(name)


def app(op: str, *args: Term) -> App:
    return App(op, args)


@dataclass(frozen=True)
class Signature:
    """Operation symbols with finite arities plus an ordered variable set."""

    symbols: tuple[tuple[str, int], ...] = ()
    variables: tuple[str, ...] = ()
    _arity: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = [n for n, _ in self.symbols]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate operation symbol in {names}")
        if len(set(self.variables)) != len(self.variables):
            raise SignatureError(f"duplicate variable in {self.variables}")
        clash = set(names) & set(self.variables)
        if clash:
            raise SignatureError(f"names used both as symbol and variable: {sorted(clash)}")
        for name, k in self.symbols:
            if not isinstance(k, int) or isinstance(k, bool) or k < 0:
                raise SignatureError(f"arity of {name} must be a non-negative integer, got {k!r}")
        self._arity.update(self.symbols)

    @classmethod
    def of(cls, symbols: Mapping[str, int] | Iterable[tuple[str, int]] = (), variables: Iterable[str] = ()):
        items = symbols.items() if isinstance(symbols, Mapping) else symbols
        return cls(tuple(items), tuple(variables))

    def arity(self, op: str) -> int:
        try:
            return self._arity[op]
        except KeyError:
            raise SignatureError(f"unknown operation symbol {op!r}") from None

    def __contains__(self, op: str) -> bool:
        return op in self._arity

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def with_variables(self, variables: Iterable[str]) -> Signature:
        return Signature(self.symbols, tuple(variables))

    def check(self, t: Term) -> Term:
        """Raise :class:`SignatureError` unless ``t`` is well formed here."""
        if isinstance(t, App):
            k = self.arity(t.op)
            if k != len(t.args):
                raise SignatureError(f"{t.op} expects {k} arguments, got {len(t.args)} in {t}")
            for a in t.args:
                self.check(a)
        return t


Substitution = Mapping[str, Term]


def apply_substitution(sigma: Substitution, t: Term) -> Term:
    """Homomorphic extension of ``sigma``; variables outside its domain are fixed."""
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.op, tuple(apply_substitution(sigma, a) for a in t.args))


def compose(sigma: Substitution, tau: Substitution) -> dict[str, Term]:
    """The substitution ``sigma ∘ tau`` (apply ``tau`` first)."""
    out = {x: apply_substitution(sigma, t) for x, t in tau.items()}
    for x, t in sigma.items():
        out.setdefault(x, t)
    return out


def subterms(t: Term) -> set[Term]:
    out: set[Term] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u in out:
            continue
        out.add(u)
        if isinstance(u, App):
            stack.extend(u.args)
    return out


def subterm_closure(ts: Iterable[Term]) -> set[Term]:
    out: set[Term] = set()
    for t in ts:
        if t not in out:
            out |= subterms(t)
    return out


def variables_of(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= variables_of(a)
    return out


def enumerate_terms(
    sig: Signature,
    variables: Iterable[str] | None = None,
    depth: int = 0,
    cap: int = DEFAULT_TERM_CAP,
) -> list[Term]:
    """All terms of depth at most ``depth`` over ``variables``, sorted by
    :func:`term_key`.  Raises :class:`TermCapExceeded` past ``cap`` terms."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    names = sig.variables if variables is None else tuple(variables)
    level: list[Term] = [Var(x) for x in sorted(set(names))]
    level += [App(op, ()) for op, k in sig.symbols if k == 0]
    seen = set(level)
    if len(seen) > cap:
        raise TermCapExceeded(f"more than {cap} terms")
    for _ in range(depth):
        current = sorted(seen, key=term_key)
        fresh = []
        for op, k in sig.symbols:
            if k == 0:
                continue
            for args in itertools.product(current, repeat=k):
                t = App(op, args)
                if t not in seen:
                    fresh.append(t)
                    seen.add(t)
                    if len(seen) > cap:
                        raise TermCapExceeded(f"more than {cap} terms at depth {depth}")
        if not fresh:
            break
    return sorted(seen, key=term_key)
