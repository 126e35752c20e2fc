"""Quantitative and conditional quantitative equations."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .extended import as_bound, fmt_bound
from .terms import Substitution, Term, Var, apply_substitution, term_key, variables_of


@dataclass(frozen=True)
class QuantEq:
    """``left =_bound right``: the two sides are at distance at most ``bound``."""

    left: Term
    right: Term
    bound: Fraction

    def __post_init__(self):
        object.__setattr__(self, "bound", as_bound(self.bound, allow_inf=False))

    def __str__(self):
        return f"{self.left} =[{fmt_bound(self.bound)}] {self.right}"

    def flipped(self) -> QuantEq:
        return QuantEq(self.right, self.left, self.bound)

    def substitute(self, sigma: Substitution) -> QuantEq:
        return QuantEq(apply_substitution(sigma, self.left), apply_substitution(sigma, self.right), self.bound)

    def terms(self) -> tuple[Term, Term]:
        return (self.left, self.right)

    def variables(self) -> set[str]:
        return variables_of(self.left) | variables_of(self.right)

    def sort_key(self):
        return (term_key(self.left), term_key(self.right), self.bound)

    def between_variables(self) -> bool:
        return isinstance(self.left, Var) and isinstance(self.right, Var)


class BasicClass(enum.Enum):
    UNCONDITIONAL = "unconditional"
    FINITARY_BASIC = "finitary-basic"
    BASIC = "basic"
    GENERAL = "general"


@dataclass(frozen=True)
class ConditionalEquation:
    hypotheses: frozenset[QuantEq]
    conclusion: QuantEq

    def __init__(self, hypotheses: Iterable[QuantEq], conclusion: QuantEq):
        object.__setattr__(self, "hypotheses", frozenset(hypotheses))
        object.__setattr__(self, "conclusion", conclusion)

    def sorted_hypotheses(self) -> list[QuantEq]:
        return sorted(self.hypotheses, key=QuantEq.sort_key)

    def variables(self) -> list[str]:
        names = set(self.conclusion.variables())
        for h in self.hypotheses:
            names |= h.variables()
        return sorted(names)

    def substitute(self, sigma: Substitution) -> ConditionalEquation:
        return ConditionalEquation((h.substitute(sigma) for h in self.hypotheses), self.conclusion.substitute(sigma))

    def is_c_basic(self, c: int) -> bool:
        """Fewer than ``c`` hypotheses, all between variables."""
        return len(self.hypotheses) < c and all(h.between_variables() for h in self.hypotheses)

    def __str__(self):
        hyps = " ; ".join(str(h) for h in self.sorted_hypotheses())
        return f"[{hyps}] |- {self.conclusion}" if hyps else f"|- {self.conclusion}"


def unconditional(left: Term, right: Term, bound) -> ConditionalEquation:
    return ConditionalEquation((), QuantEq(left, right, bound))


def classify(ce: ConditionalEquation) -> BasicClass:
    # hypothesis sets are always finite here, so every basic equation is
    # finitary-basic and BASIC is never the most specific tag.
    if not ce.hypotheses:
        return BasicClass.UNCONDITIONAL
    if all(h.between_variables() for h in ce.hypotheses):
        return BasicClass.FINITARY_BASIC
    return BasicClass.GENERAL
