"""Acceptance run: one suite per criterion, each with zero tolerated failures.

Every criterion prints a ``criterion N <suite> PASS|FAIL`` line; the lines
are repeated in the terminal summary.  Runnable directly as a script too.
"""

import sys
import time

import pytest

from quantalg.suites import DEFAULT_SEED, SUITES, determinism

CRITERIA = [
    (1, "soundness"),
    (2, "tightness"),
    (3, "closure-witnesses"),
    (4, "closure-lemmas"),
    (5, "canonical-model"),
    (6, "functor"),
    (7, "reduced-products"),
    (8, "horn-transfer"),
    (9, "birkhoff"),
]

RESULTS: dict[int, str] = {}
REPORTS: dict[str, str] = {}


def record(number, name, rep, elapsed):
    line = f"criterion {number:>2} {name:<18} {'PASS' if rep.passed else 'FAIL'}  ({rep.instances} instances, {rep.checks} checks, {elapsed:.1f}s)"
    RESULTS[number] = line
    print(line)
    return line


@pytest.mark.parametrize("number,name", CRITERIA, ids=[n for _, n in CRITERIA])
def test_criterion(number, name):
    start = time.perf_counter()
    rep = SUITES[name](DEFAULT_SEED)
    elapsed = time.perf_counter() - start
    REPORTS[name] = rep.text()
    record(number, name, rep, elapsed)
    assert rep.passed, rep.text()
    assert elapsed < 60


def test_criterion_determinism():
    start = time.perf_counter()
    # reuse the texts from the runs above; only missing suites are run twice
    rep = determinism(DEFAULT_SEED, reference=dict(REPORTS))
    elapsed = time.perf_counter() - start
    record(10, "determinism", rep, elapsed)
    assert rep.passed, rep.text()
    assert elapsed < 60


if __name__ == "__main__":
    failed = 0
    for number, name in CRITERIA:
        try:
            test_criterion(number, name)
        except AssertionError:
            failed += 1
    try:
        test_criterion_determinism()
    except AssertionError:
        failed += 1
    sys.exit(1 if failed else 0)
