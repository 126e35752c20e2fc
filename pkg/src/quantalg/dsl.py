"""Text format for signatures, algebras, theories, structures, Horn formulas
and proofs.

A workspace is a sequence of blocks::

    signature { f/1; c/0 }
    vars { x y z }
    algebra A { carrier { a b }; op f(a) = b; op f(b) = a; op c = a; dist a b = 1 }
    theory T { [x =[1] y] |- f(x) =[1] f(y); |- f(f(x)) =[0] x }
    structure M { carrier { a }; op f(a) = a; op c = a; pair a a : bound 0 closed }
    formula H { forall x y . (x =[1] y) -> (f(x) =[1] f(y)) }
    proof P for T { 0: Assumpt [x =[1] y] |- x =[1] y }

``#`` starts a comment.  Bounds are exact rationals (``3/2``); ``inf`` is
accepted only as a distance.  Diagonal distances may be omitted (they are
forced to 0); every other pair must be given in one orientation.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import QuantitativeAlgebra, validate_algebra
from .deduction import Proof, ProofStep, format_step
from .equations import ConditionalEquation, QuantEq
from .extended import INF, fmt_bound
from .qfo import HornFormula, TermEquality, Threshold, ThresholdStructure, fmt_entry
from .terms import App, Signature, SignatureError, Term, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<turnstile>\|-)
  | (?P<arrow>->)
  | (?P<assign>:=)
  | (?P<eqb>=\[)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[{}()\[\];,=/:.&])
    """,
    re.VERBOSE,
)

KEYWORDS = {"signature", "vars", "algebra", "theory", "structure", "formula", "proof"}


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col, self.detail = line, col, message
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            out.append(Token(kind if kind != "punct" else chunk, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class Workspace:
    signature: Signature = field(default_factory=Signature)
    algebras: dict[str, QuantitativeAlgebra] = field(default_factory=dict)
    theories: dict[str, tuple[ConditionalEquation, ...]] = field(default_factory=dict)
    structures: dict[str, ThresholdStructure] = field(default_factory=dict)
    formulas: dict[str, HornFormula] = field(default_factory=dict)
    proofs: dict[str, tuple[str, Proof]] = field(default_factory=dict)

    def names(self, kind: str) -> list[str]:
        return list(getattr(self, kind))


class _Parser:
    def __init__(self, text: str, signature: Signature | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = signature if signature is not None else Signature()
        self.declared_vars = signature is not None and bool(signature.variables)

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise DSLError(msg, tok.line, tok.col)

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            self.i += 1
            return self.toks[self.i - 1]
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            want = text or kind
            got = self.tok.text or "end of input"
            self.error(f"expected {want!r}, found {got!r}")
        return tok

    def keyword(self, word: str) -> Token:
        return self.expect("ident", word)

    def name(self) -> str:
        return self.expect("ident").text

    def element(self) -> str:
        if self.at("ident") or self.at("num"):
            return self.tok_advance().text
        self.error(f"expected an element name, found {self.tok.text!r}")

    def tok_advance(self) -> Token:
        self.i += 1
        return self.toks[self.i - 1]

    def separator(self):
        while self.accept(";"):
            pass

    # values
    def rational(self, allow_inf=False):
        if allow_inf and self.at("ident") and self.tok.text in ("inf", "infinite"):
            self.i += 1
            return INF
        tok = self.expect("num")
        try:
            return Fraction(tok.text)
        except ZeroDivisionError:
            self.error(f"zero denominator in {tok.text}", tok)

    # terms and equations
    def term(self) -> Term:
        tok = self.expect("ident")
        name = tok.text
        if self.accept("("):
            args = []
            if not self.at(")"):
                args.append(self.term())
                while self.accept(","):
                    args.append(self.term())
            self.expect(")")
            if name not in self.sig:
                self.error(f"unknown operation symbol {name!r}", tok)
            k = self.sig.arity(name)
            if k != len(args):
                self.error(f"{name} expects {k} arguments, got {len(args)}", tok)
            return App(name, args)
        if name in self.sig:
            if self.sig.arity(name) != 0:
                self.error(f"{name} expects {self.sig.arity(name)} arguments", tok)
            return App(name, ())
        if self.declared_vars and name not in self.sig.variables:
            self.error(f"undeclared variable {name!r}", tok)
        return Var(name)

    def quant_eq(self) -> QuantEq:
        left = self.term()
        self.expect("eqb")
        bound = self.rational()
        self.expect("]")
        return QuantEq(left, self.term(), bound)

    def conditional(self) -> ConditionalEquation:
        hyps = []
        if self.accept("["):
            if not self.at("]"):
                hyps.append(self.quant_eq())
                while self.accept(";"):
                    hyps.append(self.quant_eq())
            self.expect("]")
        self.expect("turnstile")
        return ConditionalEquation(hyps, self.quant_eq())

    def atom(self):
        left = self.term()
        if self.accept("eqb"):
            bound = self.rational()
            self.expect("]")
            return QuantEq(left, self.term(), bound)
        self.expect("=")
        return TermEquality(left, self.term())

    def horn(self) -> HornFormula:
        start = self.keyword("forall")
        names = []
        while self.at("ident"):
            names.append(self.name())
        self.expect(".")
        atoms = [self.paren_atom()]
        while self.accept("&"):
            atoms.append(self.paren_atom())
        if self.accept("arrow"):
            head = self.paren_atom()
            body = atoms
        else:
            if len(atoms) != 1:
                self.error("a conjunction needs '->' and a head atom")
            body, head = [], atoms[0]
        try:
            return HornFormula(names, body, head)
        except ValueError as e:
            self.error(str(e), start)

    def paren_atom(self):
        self.expect("(")
        a = self.atom()
        self.expect(")")
        return a

    # blocks
    def workspace(self) -> Workspace:
        ws = Workspace(self.sig)
        while not self.at("eof"):
            tok = self.expect("ident")
            kind = tok.text
            if kind == "signature":
                if ws.algebras or ws.theories or ws.structures or ws.formulas:
                    self.error("the signature must precede every object", tok)
                ws.signature = self.sig = Signature(self.signature_block(), self.sig.variables)
            elif kind == "vars":
                self.expect("{")
                names = []
                while self.at("ident"):
                    names.append(self.name())
                self.expect("}")
                try:
                    ws.signature = self.sig = self.sig.with_variables(names)
                except SignatureError as e:
                    self.error(str(e), tok)
                self.declared_vars = True
            elif kind in ("algebra", "structure"):
                name = self.name()
                table = ws.algebras if kind == "algebra" else ws.structures
                if name in table:
                    self.error(f"duplicate {kind} {name!r}", tok)
                table[name] = self.carrier_block(kind, name, tok)
            elif kind == "theory":
                name = self.name()
                if name in ws.theories:
                    self.error(f"duplicate theory {name!r}", tok)
                self.expect("{")
                axioms = []
                self.separator()
                while not self.at("}"):
                    axioms.append(self.conditional())
                    if not self.at("}"):
                        self.expect(";")
                    self.separator()
                self.expect("}")
                ws.theories[name] = tuple(axioms)
            elif kind == "formula":
                name = self.name()
                if name in ws.formulas:
                    self.error(f"duplicate formula {name!r}", tok)
                self.expect("{")
                ws.formulas[name] = self.horn()
                self.separator()
                self.expect("}")
            elif kind == "proof":
                name = self.name()
                if name in ws.proofs:
                    self.error(f"duplicate proof {name!r}", tok)
                self.keyword("for")
                theory = self.name()
                if theory not in ws.theories:
                    self.error(f"unknown theory {theory!r}")
                ws.proofs[name] = (theory, self.proof_block())
            else:
                self.error(f"unknown block {kind!r}", tok)
        return ws

    def signature_block(self):
        start = self.expect("{")
        syms = []
        self.separator()
        while not self.at("}"):
            tok = self.expect("ident")
            self.expect("/")
            syms.append((tok.text, int(self.expect("num").text)))
            if not self.at("}"):
                self.expect(";")
            self.separator()
        self.expect("}")
        try:
            Signature(tuple(syms))
        except SignatureError as e:
            self.error(str(e), start)
        return tuple(syms)

    def carrier_block(self, kind: str, name: str, start: Token):
        self.expect("{")
        self.separator()
        self.keyword("carrier")
        self.expect("{")
        carrier = []
        while not self.at("}"):
            carrier.append(self.element())
        self.expect("}")
        if len(set(carrier)) != len(carrier):
            self.error(f"repeated element in the carrier of {name}", start)
        members = set(carrier)
        ops: dict[str, dict] = {op: {} for op in self.sig.names}
        rel: dict = {}
        self.separator()
        while not self.at("}"):
            stmt = self.expect("ident")
            if stmt.text == "op":
                optok = self.expect("ident")
                op = optok.text
                if op not in self.sig:
                    self.error(f"unknown operation symbol {op!r}", optok)
                args = []
                if self.accept("("):
                    if not self.at(")"):
                        args.append(self.element())
                        while self.accept(","):
                            args.append(self.element())
                    self.expect(")")
                if len(args) != self.sig.arity(op):
                    self.error(f"{op} expects {self.sig.arity(op)} arguments", optok)
                self.expect("=")
                val = self.element()
                for e in (*args, val):
                    if e not in members:
                        self.error(f"{e!r} is not in the carrier of {name}", optok)
                if tuple(args) in ops[op]:
                    self.error(f"{op}({', '.join(args)}) defined twice", optok)
                ops[op][tuple(args)] = val
            elif stmt.text == "dist" and kind == "algebra":
                a, b = self.element(), self.element()
                self.expect("=")
                v = self.rational(allow_inf=True)
                self._record_pair(rel, a, b, v, members, name, stmt)
            elif stmt.text == "pair" and kind == "structure":
                a, b = self.element(), self.element()
                self.expect(":")
                if self.accept("ident", "infinite") or self.accept("ident", "inf"):
                    v = None
                else:
                    self.keyword("bound")
                    bound = self.rational()
                    flag = self.expect("ident")
                    if flag.text not in ("closed", "open"):
                        self.error("expected 'closed' or 'open'", flag)
                    v = Threshold(bound, flag.text == "closed")
                self._record_pair(rel, a, b, v, members, name, stmt, symmetric=False)
            else:
                self.error(f"unexpected statement {stmt.text!r} in {kind} {name}", stmt)
            if not self.at("}"):
                self.expect(";")
            self.separator()
        self.expect("}")
        return self._finish(kind, name, start, tuple(carrier), ops, rel)

    def _record_pair(self, rel, a, b, v, members, name, tok, symmetric=True):
        for e in (a, b):
            if e not in members:
                self.error(f"{e!r} is not in the carrier of {name}", tok)
        if (a, b) in rel and rel[(a, b)] != v:
            self.error(f"conflicting entries for pair {a} {b}", tok)
        rel[(a, b)] = v
        if symmetric:
            if (b, a) in rel and rel[(b, a)] != v:
                self.error(f"conflicting entries for pair {a} {b}", tok)
            rel[(b, a)] = v

    def _finish(self, kind, name, start, carrier, ops, rel):
        for op, k in self.sig.symbols:
            for args in itertools.product(carrier, repeat=k):
                if args not in ops[op]:
                    shown = f"{op}({', '.join(args)})" if k else op
                    self.error(f"{kind} {name}: {shown} is not defined", start)
        if kind == "algebra":
            for a in carrier:
                rel.setdefault((a, a), Fraction(0))
            for a in carrier:
                for b in carrier:
                    if (a, b) not in rel:
                        self.error(f"algebra {name}: missing distance for pair {a} {b}", start)
            A = QuantitativeAlgebra(self.sig.with_variables(()), carrier, ops, rel, name)
            bad = validate_algebra(A)
            if bad:
                self.error(f"algebra {name} is invalid: {bad[0]}", start)
            return A
        for a in carrier:
            for b in carrier:
                if (a, b) not in rel:
                    self.error(f"structure {name}: missing entry for pair {a} {b}", start)
        return ThresholdStructure(self.sig.with_variables(()), carrier, ops, rel, name)

    def proof_block(self) -> Proof:
        self.expect("{")
        steps = []
        self.separator()
        while not self.at("}"):
            num = self.expect("num")
            if int(num.text) != len(steps):
                self.error(f"step numbered {num.text}, expected {len(steps)}", num)
            self.expect(":")
            rule = self.name()
            premises = []
            if self.at("[") and self.toks[self.i + 1].kind == "num":
                self.expect("[")
                premises.append(int(self.expect("num").text))
                while self.accept(","):
                    premises.append(int(self.expect("num").text))
                self.expect("]")
            axiom = None
            if self.accept("ident", "axiom"):
                axiom = int(self.expect("num").text)
            sigma = []
            if self.accept("{"):
                while not self.at("}"):
                    x = self.name()
                    self.expect("assign")
                    sigma.append((x, self.term()))
                    if not self.at("}"):
                        self.expect(",")
                self.expect("}")
            ce = self.conditional()
            steps.append(ProofStep(rule, ce.hypotheses, ce.conclusion, tuple(premises), axiom, tuple(sigma)))
            self.separator()
        self.expect("}")
        return Proof(tuple(steps))

    def done(self):
        if not self.at("eof"):
            self.error(f"trailing input {self.tok.text!r}")


def parse_workspace(text: str) -> Workspace:
    return _Parser(text).workspace()


def _parse_with(text: str, signature: Signature | None, method: str):
    p = _Parser(text, signature)
    out = getattr(p, method)()
    p.done()
    return out


def parse_term(text: str, signature: Signature | None = None) -> Term:
    return _parse_with(text, signature, "term")


def parse_equation(text: str, signature: Signature | None = None) -> QuantEq:
    return _parse_with(text, signature, "quant_eq")


def parse_conditional(text: str, signature: Signature | None = None) -> ConditionalEquation:
    """``[h ; h] |- s =[e] t``; the bracket may be omitted when empty and a
    bare equation is read as unconditional."""
    if "|-" not in text:
        return ConditionalEquation((), parse_equation(text, signature))
    return _parse_with(text, signature, "conditional")


def parse_horn(text: str, signature: Signature | None = None) -> HornFormula:
    return _parse_with(text, signature, "horn")


# ---------------------------------------------------------------------------
# printing


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z|\d+\Z")


def export_labels(carrier: Iterable) -> dict:
    """Printable names for carrier elements.  Strings that are already valid
    names are kept; tuples are flattened with ``_``; anything else becomes
    ``e0, e1, ...``."""
    carrier = list(carrier)

    def flat(a):
        if isinstance(a, tuple):
            return "_".join(flat(x) for x in a) if a else "u"
        return str(a)

    names = {a: flat(a) for a in carrier}
    if all(_IDENT.match(n) and n not in KEYWORDS for n in names.values()) and len(set(names.values())) == len(carrier):
        return names
    return {a: f"e{i}" for i, a in enumerate(carrier)}


def relabel_algebra(A: QuantitativeAlgebra, labels: Mapping | None = None) -> QuantitativeAlgebra:
    from .constructions import permuted

    return permuted(A, labels or export_labels(A.carrier))


def relabel_structure(M: ThresholdStructure, labels: Mapping | None = None) -> ThresholdStructure:
    lab = labels or export_labels(M.carrier)
    ops = {op: {tuple(lab[a] for a in args): lab[v] for args, v in t.items()} for op, t in M.operations.items()}
    rel = {(lab[a], lab[b]): e for (a, b), e in M.relation.items()}
    return ThresholdStructure(M.signature, tuple(lab[a] for a in M.carrier), ops, rel, M.name)


def _op_lines(sig: Signature, carrier, apply) -> list[str]:
    lines = []
    for op, k in sig.symbols:
        for args in itertools.product(carrier, repeat=k):
            lhs = f"{op}({', '.join(args)})" if k else op
            lines.append(f"  op {lhs} = {apply(op, *args)};")
    return lines


def print_signature(sig: Signature) -> str:
    out = "signature { " + "; ".join(f"{op}/{k}" for op, k in sig.symbols) + " }" if sig.symbols else "signature { }"
    if sig.variables:
        out += "\nvars { " + " ".join(sig.variables) + " }"
    return out


def print_algebra(A: QuantitativeAlgebra, name: str | None = None) -> str:
    A = relabel_algebra(A) if export_labels(A.carrier) != {a: a for a in A.carrier} else A
    lines = [f"algebra {name or A.name or 'A'} {{", "  carrier { " + " ".join(A.carrier) + " };"]
    lines += _op_lines(A.signature, A.carrier, A.apply)
    for i, a in enumerate(A.carrier):
        for b in A.carrier[i + 1 :]:
            lines.append(f"  dist {a} {b} = {fmt_bound(A.d(a, b))};")
    lines.append("}")
    return "\n".join(lines)


def print_structure(M: ThresholdStructure, name: str | None = None) -> str:
    M = relabel_structure(M) if export_labels(M.carrier) != {a: a for a in M.carrier} else M
    lines = [f"structure {name or M.name or 'M'} {{", "  carrier { " + " ".join(M.carrier) + " };"]
    lines += _op_lines(M.signature, M.carrier, M.apply)
    for a in M.carrier:
        for b in M.carrier:
            lines.append(f"  pair {a} {b} : {fmt_entry(M.entry(a, b))};")
    lines.append("}")
    return "\n".join(lines)


def print_theory(name: str, axioms: Iterable[ConditionalEquation]) -> str:
    body = "".join(f"  {ce};\n" for ce in axioms)
    return f"theory {name} {{\n{body}}}"


def print_formula(name: str, phi: HornFormula) -> str:
    return f"formula {name} {{ {phi} }}"


def print_proof(name: str, theory: str, proof: Proof) -> str:
    body = "".join(f"  {k}: {format_step(s)}\n" for k, s in enumerate(proof.steps))
    return f"proof {name} for {theory} {{\n{body}}}"


def print_workspace(ws: Workspace) -> str:
    parts = [print_signature(ws.signature)]
    parts += [print_algebra(A, n) for n, A in ws.algebras.items()]
    parts += [print_theory(n, T) for n, T in ws.theories.items()]
    parts += [print_structure(M, n) for n, M in ws.structures.items()]
    parts += [print_formula(n, phi) for n, phi in ws.formulas.items()]
    parts += [print_proof(n, t, p) for n, (t, p) in ws.proofs.items()]
    return "\n\n".join(parts) + "\n"


def workspace_equal(a: Workspace, b: Workspace) -> bool:
    return (
        a.signature == b.signature
        and a.algebras == b.algebras
        and a.theories == b.theories
        and a.structures == b.structures
        and a.formulas == b.formulas
        and a.proofs == b.proofs
    )
