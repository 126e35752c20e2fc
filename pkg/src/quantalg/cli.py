"""Command-line front end.

    python -m quantalg [options] WORKSPACE COMMAND [ARGS...]

``WORKSPACE`` is a DSL file (``-`` for none, e.g. for ``suite``).  Exit
codes: 0 all checks pass, 1 a check failed (a witness is reported), 2 input
or validation error, 3 a budget was exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (
    BudgetExceeded,
    EvaluationError,
    Homomorphism,
    InvalidAlgebra,
    counterexample,
    evaluate,
    homomorphism_violations,
    reflexivity_failure,
    search_countermodel,
    validate_algebra,
)
from .constructions import ConstructionError, canonical_model, direct_product, generated_subalgebra
from .deduction import SaturationGuardExceeded, UniverseError, build_universe, check_proof, format_proof, least_derivable_distance
from .dsl import (
    DSLError,
    Workspace,
    export_labels,
    parse_conditional,
    parse_workspace,
    print_algebra,
    print_structure,
    print_workspace,
    relabel_algebra,
    relabel_structure,
)
from .extended import fmt_bound
from .qfo import FilterSpec, QFOAxiomError, check_qfo_axioms, horn_counterexample, reduced_product, to_algebra, to_qfo
from .suites import ALL_SUITES, DEFAULT_SEED, run_suite
from .terms import SignatureError, TermCapExceeded

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
VERDICT_CODE = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "error": EXIT_INPUT, "budget": EXIT_BUDGET}


class InputError(ValueError):
    pass


@dataclass
class Budgets:
    depth: int = 2
    max_carrier: int = 3
    term_cap: int = 50_000
    seed: int = DEFAULT_SEED

    @classmethod
    def from_env(cls, env=None) -> Budgets:
        env = os.environ if env is None else env

        def get(key, default):
            raw = env.get(key)
            if raw is None:
                return default
            try:
                return int(raw)
            except ValueError:
                raise InputError(f"{key} must be an integer, got {raw!r}") from None

        return cls(
            depth=get("QUANTALG_DEPTH", 2),
            max_carrier=get("QUANTALG_MAX_CARRIER", 3),
            term_cap=get("QUANTALG_TERM_CAP", 50_000),
            seed=get("QUANTALG_SEED", DEFAULT_SEED),
        )

    def items(self):
        return [("depth", self.depth), ("max-carrier", self.max_carrier), ("term-cap", self.term_cap), ("seed", self.seed)]


@dataclass
class Report:
    """Outcome of one command.  ``results`` and ``witnesses`` keep insertion
    order so the rendering is deterministic."""

    command: str
    digest: str
    budgets: Budgets
    verdict: str = "pass"
    results: list[tuple[str, str]] = field(default_factory=list)
    witnesses: list[str] = field(default_factory=list)
    output: str = ""
    elapsed: float | None = None

    @property
    def exit_code(self) -> int:
        return VERDICT_CODE[self.verdict]

    def add(self, key: str, value) -> None:
        self.results.append((key, str(value)))

    def failed(self, witness: str | None = None) -> None:
        self.verdict = "fail"
        if witness:
            self.witnesses.append(witness)

    def to_text(self) -> str:
        lines = [f"command: {self.command}", f"digest: {self.digest}"]
        lines.append("budgets: " + " ".join(f"{k}={v}" for k, v in self.budgets.items()))
        lines += [f"{k}: {v}" for k, v in self.results]
        for w in self.witnesses:
            for i, part in enumerate(w.splitlines()):
                lines.append(("witness: " if i == 0 else "  ") + part)
        if self.output:
            lines.append("output:")
            lines += ["  " + ln for ln in self.output.splitlines()]
        if self.elapsed is not None:
            lines.append(f"elapsed: {self.elapsed:.3f}s")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        tree = {
            "command": self.command,
            "digest": self.digest,
            "budgets": dict(self.budgets.items()),
            "results": [{"key": k, "value": v} for k, v in self.results],
            "witnesses": self.witnesses,
            "output": self.output,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
        }
        if self.elapsed is not None:
            tree["elapsed"] = round(self.elapsed, 3)
        return json.dumps(tree, indent=2) + "\n"


def digest(text: str, args: Sequence[str]) -> str:
    h = hashlib.sha256(text.encode())
    h.update("\0".join(args).encode())
    return "sha256:" + h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# commands


def _need(table: dict, name: str, kind: str):
    if name not in table:
        known = ", ".join(table) or "none"
        raise InputError(f"unknown {kind} {name!r} (known: {known})")
    return table[name]


def _split_target(args: list[str]) -> tuple[list[str], str | None]:
    for arrow in ("->", "=>"):
        if arrow in args:
            k = args.index(arrow)
            if k != len(args) - 2:
                raise InputError(f"'{arrow}' must be followed by exactly one name")
            return args[:k], args[k + 1]
    return args, None


def _structure(ws: Workspace, name: str):
    if name in ws.structures:
        return ws.structures[name]
    if name in ws.algebras:
        return to_qfo(ws.algebras[name])
    raise InputError(f"unknown structure or algebra {name!r}")


def _theory(ws: Workspace, name: str):
    if name in ("-", "none"):
        return ()
    return _need(ws.theories, name, "theory")


def _braced(args: list[str]) -> list[str]:
    """Elements from ``{a b}`` / ``{a,b}`` / ``a b`` style arguments."""
    text = " ".join(args).replace(",", " ")
    text = text.replace("{", " ").replace("}", " ")
    return text.split()


def cmd_check_algebra(ws, args, opts, rep):
    (name,) = _arity(args, 1, "check-algebra A")
    A = _need(ws.algebras, name, "algebra")
    bad = validate_algebra(A)
    rep.add("carrier-size", len(A.carrier))
    if bad:
        for b in bad:
            rep.failed(b)


def cmd_check_sat(ws, args, opts, rep):
    a, t = _arity(args, 2, "check-sat A T")
    A = _need(ws.algebras, a, "algebra")
    for k, ce in enumerate(_theory(ws, t)):
        alpha = counterexample(A, ce)
        rep.add(f"axiom-{k}", "holds" if alpha is None else "fails")
        if alpha is not None:
            s = A.d(evaluate(A, alpha, ce.conclusion.left), evaluate(A, alpha, ce.conclusion.right))
            asg = ", ".join(f"{x}->{v}" for x, v in alpha.items())
            rep.failed(f"{ce}: [{asg}] gives distance {fmt_bound(s)} > {fmt_bound(ce.conclusion.bound)}")


def cmd_derive(ws, args, opts, rep):
    t, text = _arity(args, 2, 'derive T "[hyps] |- s =[e] t"')
    axioms = _theory(ws, t)
    ce = parse_conditional(text, ws.signature if ws.signature.variables else ws.signature.with_variables(()))
    hyps = ce.sorted_hypotheses()
    U = build_universe(hyps, ce.conclusion, axioms, depth=opts.depth if axioms else 0, cap=opts.term_cap)
    table = least_derivable_distance(hyps, axioms, U, record=True)
    b = table.bound(ce.conclusion.left, ce.conclusion.right)
    rep.add("universe-size", len(U))
    rep.add("least-bound", fmt_bound(b))
    rep.add("goal-bound", fmt_bound(ce.conclusion.bound))
    if b <= ce.conclusion.bound:
        rep.add("derivable", "yes")
        rep.output = format_proof(table.proof(ce.conclusion.left, ce.conclusion.right, ce.conclusion.bound))
    else:
        rep.add("derivable", "no")
        rep.failed(f"least derivable bound {fmt_bound(b)} exceeds {fmt_bound(ce.conclusion.bound)}")


def cmd_countermodel(ws, args, opts, rep):
    t, text = _arity(args, 2, 'countermodel T "[hyps] |- s =[e] t"')
    axioms = _theory(ws, t)
    ce = parse_conditional(text, ws.signature)
    cm = search_countermodel(ws.signature, ce.sorted_hypotheses(), ce.conclusion, opts.max_carrier, axioms)
    if cm is None:
        rep.add("countermodel", f"none up to carrier size {opts.max_carrier} (grid search)")
        return
    rep.add("countermodel", f"found, carrier size {len(cm.algebra.carrier)}")
    rep.output = print_algebra(cm.algebra, "Counter")
    rep.failed(str(cm))


def cmd_product(ws, args, opts, rep):
    names, target = _split_target(args)
    if not names:
        raise InputError("product needs at least one algebra")
    P = direct_product([_need(ws.algebras, n, "algebra") for n in names], ws.signature.with_variables(()))
    _store_algebra(ws, rep, P, target or "Product")


def cmd_subalgebra(ws, args, opts, rep):
    names, target = _split_target(args)
    if not names:
        raise InputError("subalgebra A {seed} -> B")
    A = _need(ws.algebras, names[0], "algebra")
    seed = _braced(names[1:])
    try:
        B = generated_subalgebra(A, seed)
    except ConstructionError as e:
        raise InputError(str(e)) from None
    rep.add("seed", "{" + " ".join(seed) + "}")
    _store_algebra(ws, rep, B, target or "Sub")


def _store_algebra(ws, rep, A, name):
    labels = export_labels(A.carrier)
    A = relabel_algebra(A, labels).renamed(name)
    ws.algebras[name] = A
    rep.add("carrier-size", len(A.carrier))
    rep.output = print_algebra(A, name)


def cmd_canonical(ws, args, opts, rep):
    names, target = _split_target(args)
    if not names:
        raise InputError("canonical-model K... --vars n --depth d -> M")
    K = [_need(ws.algebras, n, "algebra") for n in names]
    declared = list(ws.signature.variables) or ["x", "y", "z", "u", "v", "w"]
    n = opts.vars if opts.vars is not None else min(2, len(declared))
    if n > len(declared):
        raise InputError(f"only {len(declared)} variables are declared")
    model = canonical_model(K, declared[:n], opts.depth, cap=opts.term_cap)
    rep.add("components", len(model.components))
    for line in model.manifest():
        rep.add("manifest", line)
    _store_algebra(ws, rep, model.product, target or "Canonical")


def _parse_map(args, A, B):
    mapping = {}
    for item in _braced(args):
        for sep in ("=", ":"):
            if sep in item:
                a, b = item.split(sep, 1)
                break
        else:
            raise InputError(f"map entries look like a=b, got {item!r}")
        if a not in A.index or b not in B.index:
            raise InputError(f"map entry {item!r} names unknown elements")
        mapping[a] = b
    missing = [a for a in A.carrier if a not in mapping]
    if missing:
        raise InputError(f"map is not total: {missing[0]!r} has no image")
    return Homomorphism(A, B, mapping)


def cmd_check_hom(ws, args, opts, rep):
    if len(args) < 2:
        raise InputError("check-hom A B a=b ...")
    A, B = _need(ws.algebras, args[0], "algebra"), _need(ws.algebras, args[1], "algebra")
    h = _parse_map(args[2:], A, B)
    for v in homomorphism_violations(h):
        rep.failed(v)
    rep.add("homomorphism", "yes" if rep.verdict == "pass" else "no")


def cmd_check_reflexive(ws, args, opts, rep):
    if len(args) < 2:
        raise InputError("check-reflexive A B a=b ... --c k")
    A, B = _need(ws.algebras, args[0], "algebra"), _need(ws.algebras, args[1], "algebra")
    h = _parse_map(args[2:], A, B)
    c = opts.c if opts.c is not None else 2
    bad = homomorphism_violations(h)
    if bad:
        rep.add("homomorphism", "no")
        for v in bad:
            rep.failed(v)
        return
    subset = reflexivity_failure(h, c)
    rep.add("c", c)
    if subset is None:
        rep.add("reflexive", "yes")
    else:
        rep.add("reflexive", "no")
        rep.failed("no isometric preimage for {" + " ".join(map(str, subset)) + "}")


def cmd_to_qfo(ws, args, opts, rep):
    names, target = _split_target(args)
    (name,) = _arity(names, 1, "to-qfo A -> M")
    M = to_qfo(_need(ws.algebras, name, "algebra"))
    target = target or name + "_qfo"
    ws.structures[target] = M.renamed(target)
    rep.output = print_structure(M, target)


def cmd_to_algebra(ws, args, opts, rep):
    names, target = _split_target(args)
    (name,) = _arity(names, 1, "to-algebra M -> A")
    M = _need(ws.structures, name, "structure")
    try:
        A = to_algebra(M)
    except QFOAxiomError as e:
        for k, ws_ in sorted(e.failures.items()):
            rep.add(f"axiom-{k}", "fails")
            rep.failed(f"({k}) {ws_[0]}")
        return
    target = target or name + "_alg"
    ws.algebras[target] = A.renamed(target)
    rep.output = print_algebra(A, target)


def cmd_check_qfo(ws, args, opts, rep):
    (name,) = _arity(args, 1, "check-qfo M")
    M = _structure(ws, name)
    for k, wit in sorted(check_qfo_axioms(M).items()):
        rep.add(f"axiom-{k}", "fails" if wit else "holds")
        for w in wit[:3]:
            rep.failed(f"({k}) {w}")


def cmd_reduced_product(ws, args, opts, rep):
    names, target = _split_target(args)
    if not names:
        raise InputError("reduced-product M1 M2 ... --filter {1}")
    Ms = [_structure(ws, n) for n in names]
    if opts.filter is None:
        gen = range(len(Ms))
    else:
        try:
            gen = [int(v) - 1 for v in _braced([opts.filter])]
        except ValueError:
            raise InputError(f"--filter takes 1-based positions like {{1 2}}, got {opts.filter!r}") from None
    try:
        F = FilterSpec(len(Ms), gen)
    except ValueError as e:
        raise InputError(str(e)) from None
    R = reduced_product(Ms, F)
    target = target or "Reduced"
    R = relabel_structure(R).renamed(target)
    ws.structures[target] = R
    rep.add("filter", "{" + " ".join(str(j + 1) for j in sorted(F.generator)) + "}")
    rep.add("carrier-size", len(R.carrier))
    fails = sorted(k for k, v in check_qfo_axioms(R, limit=1).items() if v)
    rep.add("axioms", "all hold" if not fails else "failing " + ",".join(map(str, fails)))
    if fails:
        rep.failed(f"reduced product fails axioms {fails}")
    rep.output = print_structure(R, target)


def cmd_eval_horn(ws, args, opts, rep):
    m, h = _arity(args, 2, "eval-horn M H")
    M = _structure(ws, m)
    phi = _need(ws.formulas, h, "formula")
    nu = horn_counterexample(M, phi)
    rep.add("formula", phi)
    if nu is None:
        rep.add("holds", "yes")
    else:
        rep.add("holds", "no")
        rep.failed("valuation " + ", ".join(f"{x}->{v}" for x, v in nu.items()))


def cmd_check_proof(ws, args, opts, rep):
    (name,) = _arity(args, 1, "check-proof P")
    theory, proof = _need(ws.proofs, name, "proof")
    verdict = check_proof(proof, ws.theories[theory])
    rep.add("steps", len(proof.steps))
    if verdict.accepted:
        rep.add("accepted", "yes")
    else:
        rep.add("accepted", "no")
        rep.failed(f"step {verdict.step}: {verdict.code}: {verdict.message}")


def cmd_print(ws, args, opts, rep):
    _arity(args, 0, "print")
    rep.output = print_workspace(ws)


def cmd_suite(ws, args, opts, rep):
    (name,) = _arity(args, 1, "suite NAME")
    if name not in ALL_SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(ALL_SUITES)}")
    result = run_suite(name, opts.seed)
    rep.output = result.text()
    rep.add("suite", name)
    rep.add("instances", result.instances)
    rep.add("failures", len(result.failures))
    if not result.passed:
        rep.failed(result.failures[0] if result.failures else "too few instances")


def _arity(args, n, usage):
    if len(args) != n:
        raise InputError(f"usage: {usage}")
    return args


COMMANDS = {
    "check-algebra": cmd_check_algebra,
    "check-sat": cmd_check_sat,
    "derive": cmd_derive,
    "countermodel": cmd_countermodel,
    "product": cmd_product,
    "subalgebra": cmd_subalgebra,
    "canonical-model": cmd_canonical,
    "check-hom": cmd_check_hom,
    "check-reflexive": cmd_check_reflexive,
    "to-qfo": cmd_to_qfo,
    "to-algebra": cmd_to_algebra,
    "check-qfo": cmd_check_qfo,
    "reduced-product": cmd_reduced_product,
    "eval-horn": cmd_eval_horn,
    "check-proof": cmd_check_proof,
    "print": cmd_print,
    "suite": cmd_suite,
}

NO_WORKSPACE = {"suite"}


def run_command(ws: Workspace, command: str, args: Sequence[str], budgets: Budgets | None = None, *, text: str = "", opts=None) -> Report:
    """Execute one command against ``ws`` (which commands may extend) and
    return its report.  Errors become verdicts, never exceptions."""
    budgets = budgets or Budgets()
    opts = opts or argparse.Namespace(vars=None, c=None, filter=None)
    for k, v in vars(budgets).items():
        setattr(opts, k, v)
    rep = Report(" ".join([command, *args]), digest(text, [command, *args]), budgets)
    try:
        fn = COMMANDS[command]
    except KeyError:
        rep.verdict = "error"
        rep.witnesses.append(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
        return rep
    try:
        fn(ws, list(args), opts, rep)
    except (TermCapExceeded, BudgetExceeded, SaturationGuardExceeded) as e:
        rep.verdict = "budget"
        rep.witnesses.append(str(e))
    except ConstructionError as e:
        rep.verdict = "budget" if "limit" in str(e) else "error"
        rep.witnesses.append(str(e))
    except (InputError, DSLError, SignatureError, UniverseError, InvalidAlgebra, EvaluationError) as e:
        rep.verdict = "error"
        rep.witnesses.append(str(e))
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quantalg", description="Quantitative equational logic workbench.")
    p.add_argument("workspace", help="DSL file, or - for none")
    p.add_argument("command", help="one of: " + ", ".join(COMMANDS))
    p.add_argument("args", nargs="*")
    p.add_argument("--depth", type=int, help="term depth budget (QUANTALG_DEPTH)")
    p.add_argument("--max-carrier", type=int, dest="max_carrier", help="countermodel carrier bound (QUANTALG_MAX_CARRIER)")
    p.add_argument("--term-cap", type=int, dest="term_cap", help="term enumeration cap (QUANTALG_TERM_CAP)")
    p.add_argument("--seed", type=int, help="seed for randomised suites (QUANTALG_SEED)")
    p.add_argument("--vars", type=int, help="number of variables for canonical-model")
    p.add_argument("--c", type=int, help="reflexivity parameter")
    p.add_argument("--filter", help="filter generator for reduced-product, 1-based, e.g. {1 2}")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--timing", action="store_true", help="include elapsed time (breaks byte-identity)")
    p.add_argument("--save", help="write the resulting workspace to this path")
    return p


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    # '->' looks like an option to argparse; smuggle it through
    argv = ["=>" if a == "->" else a for a in argv]
    parser = build_parser()
    try:
        opts = parser.parse_intermixed_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    try:
        budgets = Budgets.from_env()
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    for key in ("depth", "max_carrier", "term_cap", "seed"):
        if getattr(opts, key) is not None:
            setattr(budgets, key, getattr(opts, key))
    text = ""
    ws = Workspace()
    if opts.workspace != "-":
        try:
            with open(opts.workspace, encoding="utf-8") as fh:
                text = fh.read()
            ws = parse_workspace(text)
        except OSError as e:
            print(f"error: cannot read {opts.workspace}: {e.strerror}", file=sys.stderr)
            return EXIT_INPUT
        except (DSLError, SignatureError, InvalidAlgebra, ValueError) as e:
            rep = Report(" ".join([opts.command, *opts.args]), digest(text, [opts.command, *opts.args]), budgets, verdict="error")
            rep.witnesses.append(f"{opts.workspace}: {e}")
            stdout.write(rep.to_json() if opts.json else rep.to_text())
            return rep.exit_code
    elif opts.command not in NO_WORKSPACE and opts.command != "print":
        print("error: this command needs a workspace file", file=sys.stderr)
        return EXIT_INPUT
    start = time.perf_counter()
    rep = run_command(ws, opts.command, opts.args, budgets, text=text, opts=opts)
    shown = list(argv)
    shown.remove(opts.workspace)
    shown = ["->" if a == "=>" else a for a in shown if a not in ("--json", "--timing")]
    rep.command = " ".join(shown)
    rep.digest = digest(text, shown)
    if opts.timing:
        rep.elapsed = time.perf_counter() - start
    stdout.write(rep.to_json() if opts.json else rep.to_text())
    if opts.save and rep.verdict in ("pass", "fail"):
        with open(opts.save, "w", encoding="utf-8") as fh:
            fh.write(print_workspace(ws))
    return rep.exit_code
