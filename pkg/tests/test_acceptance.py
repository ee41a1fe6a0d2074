"""The nine acceptance criteria, each at its stated tolerance and time budget.

Every test prints one ``PASS``/``FAIL`` line; the lines are repeated in
the terminal summary.
"""

import json
import math
import random
import time

import numpy as np
import pytest

from infdiv import harness
from infdiv.arith import Jordan, Session, Xi, pointwise_power
from infdiv.cli import run_command
from infdiv.dsl import parse_fn_expr
from infdiv.errors import ParseError
from infdiv.matrix import (SymMatrix, build_matrix, diag_scale, hadamard_power, min_psd_exponent,
                           psd_check)
from infdiv.matrix_io import emit_matrix, matrix_from_csv, matrix_from_json
from infdiv.sets import IntegerSet, class_membership
from test_cli import REMARK_TABLE, SCENARIOS
from test_dsl import ERROR_CORPUS


@pytest.fixture
def report(acceptance_log):
    def emit(number: int, title: str, ok: bool, detail: str, elapsed: float) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail}; {elapsed:.2f} s)"
        print(line)
        acceptance_log.append(line)
        return ok
    return emit


def _failures(rep):
    return f"{rep.instances} instances, {len(rep.failures)} failures"


def test_1_counterexample(report):
    t0 = time.perf_counter()
    f = harness.remark_function()
    a = build_matrix(f, IntegerSet.of([6, 10, 15]), "gcd")
    shown = np.array_equal(a.entries, [[1, 1, 0], [1, 3, 1], [0, 1, 1]])
    at1 = psd_check(hadamard_power(a, 1.0)).is_psd
    at06 = psd_check(hadamard_power(a, 0.6)).is_psd
    r = min_psd_exponent(a, 0.0, 1.0, 1e-6)
    err = abs(r - math.log(2) / math.log(3))
    elapsed = time.perf_counter() - t0
    ok = shown and at1 and not at06 and err <= 1e-6 and elapsed < 1.0
    assert report(1, "counterexample", ok, f"min r = {r:.10f}, error {err:.1e}", elapsed)


def test_2_smith(report):
    t0 = time.perf_counter()
    rep = harness.suite_smith()
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.instances == 40 and elapsed < 1.0
    assert report(2, "Smith determinant", ok, _failures(rep), elapsed)


def test_3_det_lower_bound(report):
    t0 = time.perf_counter()
    rep = harness.suite_det_bound(harness.DEFAULT_SEED, count=200, eps_list=(0.1, 1.0))
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.instances == 200 * 3 * 3 and not rep.skipped and elapsed < 10.0
    assert report(3, "determinant lower bound", ok, _failures(rep), elapsed)


def test_4_pointwise_power_closure(report):
    t0 = time.perf_counter()
    rep = harness.suite_lemma22(harness.DEFAULT_SEED, count=50)
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.instances == 50 and elapsed < 5.0
    assert report(4, "pointwise power closure", ok, _failures(rep), elapsed)


def test_5_tuple_sum_and_composites(report):
    t0 = time.perf_counter()
    eq5 = harness.suite_eq5(max_m=60)
    comp = harness.suite_lemma23()
    elapsed = time.perf_counter() - t0
    ok = eq5.passed and comp.passed and not comp.skipped and elapsed < 30.0
    detail = f"tuple sums: {_failures(eq5)}; composites: {_failures(comp)}"
    assert report(5, "tuple-sum oracle and composites", ok, detail, elapsed)


def test_6_infinite_divisibility_presets(report):
    t0 = time.perf_counter()
    grid = (0.05, 4.0, 0.05)
    reps = [harness.run_presets(name, grid) for name in ("ex31", "ex32", "ex33")]
    elapsed = time.perf_counter() - t0
    ok = all(r.passed and not r.skipped and r.instances for r in reps) and elapsed < 30.0
    detail = "; ".join(f"{r.statement}: {_failures(r)}" for r in reps)
    assert report(6, "preset probing and exact-log agreement", ok, detail, elapsed)


def test_7_diagonal_scaling(report):
    t0 = time.perf_counter()
    rng = random.Random(harness.DEFAULT_SEED)
    worst, cases = 0.0, 0
    session = Session()
    for _ in range(20):
        s = harness.random_set(rng)
        for f in (Xi(1.0), Jordan(2.0)):
            for r in (0.5, 1.0, 2.0):
                g = pointwise_power(f, r)
                d = np.array([1.0 / session.value(g, x) for x in s])
                lhs = build_matrix(g, s, "rlcm", session).entries
                rhs = diag_scale(build_matrix(g, s, "gcd", session), d).entries
                scale = max(1.0, float(np.max(np.abs(lhs))))
                worst = max(worst, float(np.max(np.abs(lhs - rhs))) / scale)
                cases += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and cases == 120
    assert report(7, "diagonal scaling identity", ok, f"{cases} cases, worst {worst:.1e}", elapsed)


def test_8_psd_sanity(report):
    t0 = time.perf_counter()
    ident = psd_check(SymMatrix(np.eye(4))).is_psd
    lam = psd_check(SymMatrix([[1.0, 2.0], [2.0, 1.0]])).min_eigenvalue
    rng = np.random.default_rng(harness.DEFAULT_SEED)
    mismatches = 0
    for k in range(100):
        n = int(rng.integers(2, 7))
        g = rng.normal(size=(n, n))
        if k % 2 == 0:
            a = g @ g.T + 0.1 * np.eye(n)
        else:
            a = g @ g.T
            a -= (np.linalg.eigvalsh(a)[0] + 0.5) * np.eye(n)
        w = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
        before = psd_check(SymMatrix(a)).is_psd
        after = psd_check(diag_scale(SymMatrix(a), w)).is_psd
        mismatches += before != after or before != (k % 2 == 0)
    elapsed = time.perf_counter() - t0
    ok = ident and abs(lam + 1) <= 1e-9 and mismatches == 0
    assert report(8, "PSD engine sanity", ok, f"lambda_min = {lam:.12f}, {mismatches} mismatches", elapsed)


def test_9_cli_contract(report, tmp_path, monkeypatch, capsys):
    t0 = time.perf_counter()
    wrong_offsets = 0
    for text, offset, expected in ERROR_CORPUS[:10]:
        try:
            parse_fn_expr(text)
            wrong_offsets += 1
        except ParseError as exc:
            wrong_offsets += exc.offset != offset or set(exc.expected) != expected

    rng = np.random.default_rng(harness.DEFAULT_SEED)
    bad_trips = 0
    for _ in range(20):
        x = rng.normal(size=(5, 5)) * 10.0 ** rng.integers(-20, 20, size=(5, 5))
        a = SymMatrix(np.triu(x) + np.triu(x, 1).T)
        for back in (matrix_from_csv(emit_matrix(a, "csv")), matrix_from_json(emit_matrix(a, "json"))):
            bad_trips += not np.array_equal(back.entries.view(np.int64), a.entries.view(np.int64))

    monkeypatch.chdir(tmp_path)
    (tmp_path / "remark.json").write_text(json.dumps(REMARK_TABLE))
    for name, text in (("bad.csv", "1,2\n2,1\n"), ("good.csv", "2,1\n1,2\n"), ("ones.csv", "1,1\n1,1\n"),
                       ("asym.csv", "1,2\n3,1\n"), ("neg.csv", "1,-0.5\n-0.5,1\n"),
                       ("set.json", "[15, 6, 10]")):
        (tmp_path / name).write_text(text)
    wrong_codes = []
    for code, argv in SCENARIOS:
        got = run_command(list(argv))
        capsys.readouterr()
        if got != code:
            wrong_codes.append((argv, got, code))
    elapsed = time.perf_counter() - t0
    ok = not wrong_offsets and not bad_trips and not wrong_codes
    detail = (f"{len(ERROR_CORPUS[:10])} parse cases, {wrong_offsets} wrong; 40 round trips, "
              f"{bad_trips} inexact; {len(SCENARIOS)} exit-code scenarios, {len(wrong_codes)} wrong")
    assert report(9, "CLI contract", ok, detail, elapsed), wrong_codes
