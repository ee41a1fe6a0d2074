"""Instance-level checks of the GCD/LCM matrix results, with brute-force oracles.

Every ``verify_*`` function returns a :class:`VerificationReport`.
:data:`SUITES` maps statement ids to default instance suites, which is
what ``infdiv verify <id>`` runs.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .arith import (ArithFn, Conv, ConvPower, Jordan, Mu, Mult, Session, Table, Xi, _divisors,
                    affine_combo, conv_all, conv_power, mobius, pointwise_power)
from .dsl import parse_fn_expr, to_expr
from .errors import HypothesisError, UsageError
from .matrix import (DEFAULT_GRID, InfDivMode, MatrixKind, Verdict, build_matrix, determinant,
                     hadamard_power, infdiv_check, min_psd_exponent, psd_check)
from .sets import IntegerSet, alpha_vector, class_membership

STATEMENTS = ("smith", "eq1", "eq2", "lemma21", "lemma22", "lemma23", "eq5",
              "thm21", "thm22", "thm23", "remark", "ex31", "ex32", "ex33")
DEFAULT_SEED = 20240607
DET_SLACK = 1e-9
SMITH_REL = 1e-6
EQ5_TOL = 1e-9
REMARK_THRESHOLD = math.log(2) / math.log(3)


@dataclass
class VerificationReport:
    statement: str
    instances: int = 0
    failures: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, instance: str, ok: bool, observed, expected, slack):
        self.instances += 1
        if not ok:
            self.failures.append((instance, observed, expected, slack))

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        self.instances += other.instances
        self.failures.extend(other.failures)
        self.skipped.extend(other.skipped)
        return self

    def to_dict(self) -> dict:
        return {
            "statement": self.statement,
            "passed": self.passed,
            "instances": self.instances,
            "seed": self.seed,
            "failures": [
                {"instance": i, "observed": o, "expected": e, "slack": s}
                for i, o, e, s in self.failures
            ],
            "skipped": list(self.skipped),
        }


def summary_table(reports: Sequence[VerificationReport]) -> str:
    lines = [f"{'statement':<10} {'result':<6} {'instances':>9} {'failures':>8}"]
    for r in reports:
        lines.append(f"{r.statement:<10} {'PASS' if r.passed else 'FAIL':<6} "
                     f"{r.instances:>9} {len(r.failures):>8}")
        for inst, obs, exp, slack in r.failures[:5]:
            lines.append(f"    {inst}: observed {obs!r}, expected {exp!r}, slack {slack:+.3e}")
    return "\n".join(lines)


def _name(f: ArithFn) -> str:
    return to_expr(f)


def random_set(rng: random.Random, max_n: int = 6, max_elem: int = 200) -> IntegerSet:
    n = rng.randint(1, max_n)
    return IntegerSet.of(rng.sample(range(1, max_elem + 1), n))


def _det_scale(a: np.ndarray, *others: float) -> float:
    # Hadamard's bound on a PSD determinant.
    return max(1.0, abs(float(np.prod(np.diag(a)))), *(abs(x) for x in others))


def _require_class(report, f, s, session, strict=False, what="f") -> bool:
    cr = class_membership(f, s, strict=strict, session=session)
    if not cr.member:
        report.skipped.append(
            f"{what}={_name(f)} on S={list(s)} not in {cr.class_name}: violations {list(cr.violations)[:3]}"
        )
    return cr.member


# --------------------------------------------------------------------------
# Smith identity
# --------------------------------------------------------------------------

def verify_smith(f: ArithFn, n: int) -> VerificationReport:
    """det(f(gcd(i, j)))_{i,j<=n} against the product of (f*mu)(k), k <= n."""
    if not 1 <= n <= 12:
        raise UsageError("Smith check is limited to 1 <= n <= 12")
    report = VerificationReport("smith")
    session = Session()
    s = IntegerSet.of(range(1, n + 1))
    a = build_matrix(f, s, MatrixKind.GCD, session)
    det = determinant(a)
    prod = math.prod(session.mobius_conv(f, k)[0] for k in range(1, n + 1))
    slack = SMITH_REL * max(1.0, abs(prod)) - abs(det - prod)
    report.record(f"{_name(f)} n={n}", slack >= 0, det, prod, slack)
    return report


# --------------------------------------------------------------------------
# determinant lower bound
# --------------------------------------------------------------------------

def _eq2_instance(report, f, s, session, label):
    a = build_matrix(f, s, MatrixKind.GCD, session).entries
    det = float(np.linalg.det(a))
    bound = alpha_vector(f, s, session).product()
    slack = det - bound
    ok = slack >= -DET_SLACK * _det_scale(a, bound)
    report.record(label, ok, det, bound, slack)


def verify_det_lower_bound(f: ArithFn, s: IntegerSet, eps_list=(0.1, 1.0),
                           fbar: ArithFn | None = None,
                           parts=("eq1", "eq2")) -> VerificationReport:
    """det(f(x_i, x_j)) >= product of alpha_f(x_k), also for f + eps*fbar.

    ``parts`` selects the unperturbed bound (``eq2``) and/or the
    perturbed ones (``eq1``, labelled as such).  Precondition failures
    (f outside C_S, fbar outside the strict class) are listed in
    ``skipped``.
    """
    if len(s) > 8:
        raise UsageError("determinant bound check is limited to n <= 8")
    fbar = fbar if fbar is not None else Xi(1.0)
    report = VerificationReport("eq1" if tuple(parts) == ("eq1",) else "eq2")
    session = Session()
    if not _require_class(report, f, s, session):
        return report
    if "eq2" in parts:
        _eq2_instance(report, f, s, session, f"eq2 {_name(f)} S={list(s)}")
    if "eq1" in parts and eps_list and _require_class(report, fbar, s, session, strict=True, what="fbar"):
        for eps in eps_list:
            g = affine_combo([(1.0, f), (float(eps), fbar)])
            _eq2_instance(report, g, s, session, f"eq1 {_name(f)} + {eps}*{_name(fbar)} S={list(s)}")
    return report


def verify_lemma21(f: ArithFn, s: IntegerSet, eps_list=(1.0, 1e-2, 1e-4, 1e-6),
                   fbar: ArithFn | None = None) -> VerificationReport:
    """PSD of (f(x_i, x_j)) for f in C_S, checked three ways.

    The matrix itself goes through :func:`psd_check`; every principal
    minor is tested against its own alpha-product bound; and the
    perturbations f + eps*fbar are checked positive definite with
    determinants converging to det(f(x_i, x_j)).
    """
    fbar = fbar if fbar is not None else Xi(1.0)
    report = VerificationReport("lemma21")
    session = Session()
    if not _require_class(report, f, s, session):
        return report
    a = build_matrix(f, s, MatrixKind.GCD, session)
    v = psd_check(a)
    report.record(f"psd {_name(f)} S={list(s)}", v.is_psd, v.min_eigenvalue, -v.tolerance,
                  v.min_eigenvalue + v.tolerance)
    xs = s.elements
    for k in range(1, len(xs) + 1):
        for sub in itertools.combinations(range(len(xs)), k):
            ss = IntegerSet.of(xs[i] for i in sub)
            m = a.entries[np.ix_(sub, sub)]
            det = float(np.linalg.det(m))
            bound = alpha_vector(f, ss, session).product()
            slack = det - max(bound, 0.0)
            ok = slack >= -DET_SLACK * _det_scale(m, bound)
            report.record(f"minor {list(ss)} {_name(f)}", ok, det, bound, slack)
    det0 = float(np.linalg.det(a.entries))
    prev_gap = math.inf
    for eps in sorted(eps_list, reverse=True):
        g = affine_combo([(1.0, f), (float(eps), fbar)])
        b = build_matrix(g, s, MatrixKind.GCD, session)
        vb = psd_check(b)
        report.record(f"psd {_name(f)} + {eps}*{_name(fbar)}", vb.is_psd, vb.min_eigenvalue,
                      -vb.tolerance, vb.min_eigenvalue + vb.tolerance)
        gap = abs(float(np.linalg.det(b.entries)) - det0)
        tol = DET_SLACK * _det_scale(b.entries)
        report.record(f"limit eps={eps} {_name(f)}", gap <= prev_gap + tol, gap, prev_gap,
                      prev_gap + tol - gap)
        prev_gap = gap
    return report


# --------------------------------------------------------------------------
# class closure lemmas
# --------------------------------------------------------------------------

def verify_lemma22(f: ArithFn, s: IntegerSet, r_list) -> VerificationReport:
    """f in C_S multiplicative implies f**r in C_S for each r."""
    report = VerificationReport("lemma22")
    session = Session()
    if f.multiplicative is not Mult.YES:
        report.skipped.append(f"{_name(f)} is not flagged multiplicative")
        return report
    if not _require_class(report, f, s, session):
        return report
    for r in r_list:
        g = pointwise_power(f, r)
        cr = class_membership(g, s, session=session)
        worst = min((v for _, v in cr.violations), default=0.0)
        report.record(f"{_name(f)}^{r} S={list(s)}", cr.member, list(cr.violations), [], worst)
    return report


def lemma23_composite(fs: Sequence[ArithFn], ls: Sequence[int], d: int) -> ArithFn:
    parts = [conv_power(f, l) for f, l in zip(fs, ls)]
    return conv_all(parts + [conv_power(Mu(), d)])


def verify_lemma23(fs: Sequence[ArithFn], ls: Sequence[int], d: int,
                   s: IntegerSet) -> VerificationReport:
    """f_1^(l_1) * ... * f_c^(l_c) * mu^(d) in C_S when sum(l) > d."""
    if len(fs) != len(ls) or not fs:
        raise UsageError("fs and ls must be non-empty and of equal length")
    if any(l < 1 for l in ls):
        raise HypothesisError("convolution exponents must be positive")
    if sum(ls) <= d:
        raise HypothesisError(f"sum of exponents {sum(ls)} must exceed d = {d}")
    report = VerificationReport("lemma23")
    session = Session()
    for f in fs:
        if not _require_class(report, f, s, session):
            return report
    g = lemma23_composite(fs, ls, d)
    cr = class_membership(g, s, session=session)
    worst = min((v for _, v in cr.violations), default=0.0)
    report.record(f"{_name(g)} S={list(s)}", cr.member, list(cr.violations), [], worst)
    return report


def _ordered_factorizations(m: int, parts: int):
    if parts == 1:
        yield (m,)
        return
    for d in _divisors(m):
        for rest in _ordered_factorizations(m // d, parts - 1):
            yield (d,) + rest


def eq5_oracle(gs: Sequence[ArithFn], d: int, m: int, session: Session | None = None) -> float:
    """Brute-force tuple sum for ((g_1*...*g_l*mu^(d))*mu)(m).

    Sums, over ordered tuples with m_1...m_l = m, the product of
    (g_i*mu)(m_i) for i <= d+1 and g_j(m_j) for the remaining factors.
    """
    l = len(gs)
    if not 0 <= d < l:
        raise UsageError(f"need 0 <= d < l, got d={d}, l={l}")
    if l > 4 or not 1 <= m <= 60:
        raise UsageError("oracle is limited to l <= 4 and 1 <= m <= 60")
    session = session or Session(fast=False)
    mob = {}

    def g_mu(i, k):
        key = (i, k)
        if key not in mob:
            mob[key] = math.fsum(session.value(gs[i], e) * mobius(k // e) for e in _divisors(k))
        return mob[key]

    total = 0.0
    for tup in _ordered_factorizations(m, l):
        term = 1.0
        for i, mi in enumerate(tup):
            term *= g_mu(i, mi) if i <= d else session.value(gs[i], mi)
            if term == 0.0:
                break
        total += term
    return total


def eq5_pairwise(gs: Sequence[ArithFn], d: int) -> ArithFn:
    return Conv(conv_all(list(gs) + [ConvPower(Mu(), d)]), Mu())


def verify_eq5(gs: Sequence[ArithFn], d: int, ms=range(1, 61)) -> VerificationReport:
    report = VerificationReport("eq5")
    session = Session(fast=False)
    h = eq5_pairwise(gs, d)
    names = ",".join(_name(g) for g in gs)
    for m in ms:
        oracle = eq5_oracle(gs, d, m, session)
        pair = session.value(h, m)
        slack = EQ5_TOL * max(1.0, abs(oracle)) - abs(oracle - pair)
        report.record(f"gs=({names}) d={d} m={m}", slack >= 0, pair, oracle, slack)
    return report


# --------------------------------------------------------------------------
# non-multiplicative counterexample
# --------------------------------------------------------------------------

def remark_function() -> Table:
    return Table.from_mapping({1: 0.0, 3: 0.0, 10: 3.0}, default=1.0)


REMARK_SET = (6, 10, 15)
REMARK_MATRIX = ((1.0, 1.0, 0.0), (1.0, 3.0, 1.0), (0.0, 1.0, 1.0))


def reproduce_counterexample(eps: float = 1e-6) -> VerificationReport:
    """Rebuild the non-multiplicative counterexample and its exponent threshold."""
    report = VerificationReport("remark")
    f = remark_function()
    s = IntegerSet.of(REMARK_SET)
    session = Session()
    cr = class_membership(f, s, session=session)
    report.record("f in C_S", cr.member, list(cr.violations), [], 0.0)
    f6, f2, f3 = f.lookup(6), f.lookup(2), f.lookup(3)
    report.record("f(6) != f(2) f(3)", f6 != f2 * f3, f6, f2 * f3, abs(f6 - f2 * f3))
    a = build_matrix(f, s, MatrixKind.GCD, session)
    diff = float(np.max(np.abs(a.entries - np.array(REMARK_MATRIX))))
    report.record("displayed matrix", diff == 0.0, a.entries.tolist(), REMARK_MATRIX, -diff)
    v1 = psd_check(hadamard_power(a, 1.0))
    report.record("PSD at r=1", v1.is_psd, v1.min_eigenvalue, -v1.tolerance,
                  v1.min_eigenvalue + v1.tolerance)
    v6 = psd_check(hadamard_power(a, 0.6))
    report.record("not PSD at r=0.6", not v6.is_psd, v6.min_eigenvalue, -v6.tolerance,
                  -v6.tolerance - v6.min_eigenvalue)
    r = min_psd_exponent(a, 0.0, 1.0, eps)
    report.record("threshold log2/log3", abs(r - REMARK_THRESHOLD) <= eps, r, REMARK_THRESHOLD,
                  eps - abs(r - REMARK_THRESHOLD))
    grid = infdiv_check(a, InfDivMode.GRID)
    report.record("grid refutes infinite divisibility", grid.verdict is Verdict.NOT_INFDIV,
                  grid.verdict.value, Verdict.NOT_INFDIV.value, 0.0)
    return report


# --------------------------------------------------------------------------
# infinite divisibility theorems
# --------------------------------------------------------------------------

def verify_infdiv_theorems(f: ArithFn, s: IntegerSet, grid=DEFAULT_GRID,
                           statement: str = "thm21") -> VerificationReport:
    """All three matrix kinds of a multiplicative C_S function are infinitely divisible.

    Each kind is probed on ``grid``; strictly positive matrices must also
    pass the exact log criterion, and the two modes must agree.
    """
    report = VerificationReport(statement)
    session = Session()
    if f.multiplicative is not Mult.YES:
        report.skipped.append(f"{_name(f)} is not flagged multiplicative")
        return report
    if not _require_class(report, f, s, session):
        return report
    for kind in MatrixKind:
        a = build_matrix(f, s, kind, session)
        label = f"{kind.value} {_name(f)} S={list(s)}"
        probe = infdiv_check(a, InfDivMode.GRID, grid)
        for r, lam in probe.evidence:
            thr = _threshold_at(a, r)
            report.record(f"{label} r={r:g}", lam >= -thr, lam, -thr, lam + thr)
        if np.all(a.entries > 0):
            exact = infdiv_check(a, InfDivMode.EXACT, grid)
            ok = exact.verdict is Verdict.INFDIV
            report.record(f"{label} exact-log", ok, exact.verdict.value, Verdict.INFDIV.value,
                          exact.log_min_eigenvalue or 0.0)
            agree = ok == (probe.verdict is not Verdict.NOT_INFDIV)
            report.record(f"{label} modes agree", agree, exact.verdict.value, probe.verdict.value, 0.0)
    return report


def _threshold_at(a, r):
    from .matrix import psd_threshold

    return psd_threshold(hadamard_power(a, r))


# --------------------------------------------------------------------------
# presets and default suites
# --------------------------------------------------------------------------

PRESETS: dict[str, list[tuple[str, tuple[int, ...]]]] = {
    "ex31": [(f"xi({e})", s) for e in ("0", "0.5", "0.7", "1", "2")
             for s in ((6, 10, 15), (1, 2, 3, 4, 5, 6), (4, 9, 12, 30))],
    "ex32": [(f"jordan({e})", s) for e in ("1", "1.5", "2", "3")
             for s in ((2, 3, 4), (6, 10, 15), (4, 9, 12, 30))],
    "ex33": [
        (f"conv(conv(cpow(xi({e}), {l}), cpow(jordan({j}), {t})), mupow({d}))", s)
        for e, j in (("0.5", "1.5"), ("1", "2"))
        for l, t, d in ((1, 1, 1), (2, 1, 2), (0, 2, 1), (1, 0, 0), (2, 2, 3))
        for s in ((6, 10, 15), (1, 2, 3, 4, 5, 6))
    ],
}


def run_presets(name: str, grid=DEFAULT_GRID) -> VerificationReport:
    report = VerificationReport(name)
    for expr, s in PRESETS[name]:
        report.merge(verify_infdiv_theorems(parse_fn_expr(expr), IntegerSet.of(s), grid, name))
    return report


def suite_smith(seed=None) -> VerificationReport:
    report = VerificationReport("smith")
    for f in (Xi(0.0), Xi(1.0), Xi(2.0), Jordan(2.0)):
        for n in range(1, 11):
            report.merge(verify_smith(f, n))
    return report


EQ2_FUNCTIONS = (Xi(1.0), Jordan(2.0), Conv(Xi(1.0), Jordan(2.0)))


def suite_det_bound(seed=DEFAULT_SEED, count=200, eps_list=(0.1, 1.0), parts=("eq1", "eq2")):
    rng = random.Random(seed)
    report = VerificationReport("eq1" if tuple(parts) == ("eq1",) else "eq2", seed=seed)
    for _ in range(count):
        s = random_set(rng)
        for f in EQ2_FUNCTIONS:
            report.merge(verify_det_lower_bound(f, s, eps_list, parts=parts))
    return report


def fuzz_functions(rng: random.Random) -> ArithFn:
    kind = rng.randrange(3)
    if kind == 0:
        return Xi(round(rng.uniform(0, 3), 6))
    if kind == 1:
        return Jordan(round(rng.uniform(1, 3), 6))
    pick = lambda: (Xi(round(rng.uniform(0, 3), 6)) if rng.random() < 0.5  # noqa: E731
                    else Jordan(round(rng.uniform(1, 3), 6)))
    return Conv(pick(), pick())


def suite_lemma21(seed=DEFAULT_SEED, count=200) -> VerificationReport:
    """Randomized determinant-bound and PSD checks on random (S, f)."""
    rng = random.Random(seed)
    report = VerificationReport("lemma21", seed=seed)
    for _ in range(count):
        s = random_set(rng)
        f = fuzz_functions(rng)
        session = Session()
        a = build_matrix(f, s, MatrixKind.GCD, session)
        v = psd_check(a)
        report.record(f"psd {_name(f)} S={list(s)}", v.is_psd, v.min_eigenvalue, -v.tolerance,
                      v.min_eigenvalue + v.tolerance)
        _eq2_instance(report, f, s, session, f"eq2 {_name(f)} S={list(s)}")
    for f, s in ((Xi(1.0), (6, 10, 15)), (Jordan(1.0), (2, 3, 4, 12)), (Xi(0.0), (4, 6, 9))):
        report.merge(verify_lemma21(f, IntegerSet.of(s)))
    return report


def suite_lemma22(seed=DEFAULT_SEED, count=50) -> VerificationReport:
    rng = random.Random(seed)
    report = VerificationReport("lemma22", seed=seed)
    for _ in range(count):
        if rng.random() < 0.5:
            f = Xi(round(rng.uniform(0, 3), 6))
        else:
            f = Jordan(round(rng.uniform(1, 3), 6))
        s = random_set(rng)
        r = round(rng.uniform(0, 4), 6)
        report.merge(verify_lemma22(f, s, [r]))
    return report


LEMMA23_CASES = (
    ((Xi(1.0),), (2,), 1, (6, 10, 15)),
    ((Xi(0.0),), (1,), 0, (6, 10, 15)),
    ((Xi(1.0), Jordan(2.0)), (1, 1), 1, (12, 18)),
    ((Xi(0.5), Jordan(1.5)), (2, 1), 2, (4, 9, 30, 60)),
    ((Xi(0.0), Xi(1.0), Jordan(2.0)), (1, 1, 1), 2, (8, 12, 45)),
    ((Jordan(1.0),), (3,), 2, (16, 24, 36)),
)


def suite_lemma23(seed=None) -> VerificationReport:
    report = VerificationReport("lemma23")
    for fs, ls, d, s in LEMMA23_CASES:
        report.merge(verify_lemma23(fs, ls, d, IntegerSet.of(s)))
    return report


EQ5_FUNCTIONS = (Xi(0.0), Xi(1.0), Jordan(2.0))


def suite_eq5(seed=None, max_m=60) -> VerificationReport:
    report = VerificationReport("eq5")
    for l in range(1, 5):
        for gs in itertools.product(EQ5_FUNCTIONS, repeat=l):
            for d in range(l):
                report.merge(verify_eq5(gs, d, range(1, max_m + 1)))
    return report


def suite_thm21(seed=None) -> VerificationReport:
    report = VerificationReport("thm21")
    for f in (Xi(0.7), Xi(1.0), Jordan(1.0), Jordan(2.0), pointwise_power(Jordan(2.0), 0.5)):
        for s in ((6, 10, 15), (2, 3, 4), (4, 9, 12, 30)):
            report.merge(verify_infdiv_theorems(f, IntegerSet.of(s), statement="thm21"))
    return report


def suite_thm22(seed=None) -> VerificationReport:
    report = VerificationReport("thm22")
    cases = (((Xi(1.0), Jordan(2.0)), (1, 1), 1), ((Xi(0.5), Jordan(1.5)), (2, 1), 2),
             ((Xi(0.0), Jordan(1.0)), (1, 2), 0))
    for fs, ls, d in cases:
        g = lemma23_composite(fs, ls, d)
        for s in ((6, 10, 15), (1, 2, 3, 4, 5, 6)):
            report.merge(verify_infdiv_theorems(g, IntegerSet.of(s), statement="thm22"))
    return report


def suite_thm23(seed=None) -> VerificationReport:
    report = VerificationReport("thm23")
    for f in (Xi(1.0), Jordan(1.5)):
        for l, d in ((1, 0), (2, 1), (3, 2), (3, 0)):
            g = Conv(conv_power(f, l), conv_power(Mu(), d))
            for s in ((6, 10, 15), (4, 9, 12, 30)):
                report.merge(verify_infdiv_theorems(g, IntegerSet.of(s), statement="thm23"))
    return report


SUITES: dict[str, Callable[..., VerificationReport]] = {
    "smith": suite_smith,
    "eq1": lambda seed=DEFAULT_SEED: suite_det_bound(seed, parts=("eq1",)),
    "eq2": lambda seed=DEFAULT_SEED: suite_det_bound(seed, parts=("eq2",)),
    "lemma21": suite_lemma21,
    "lemma22": suite_lemma22,
    "lemma23": suite_lemma23,
    "eq5": suite_eq5,
    "thm21": suite_thm21,
    "thm22": suite_thm22,
    "thm23": suite_thm23,
    "remark": lambda seed=None: reproduce_counterexample(),
    "ex31": lambda seed=None: run_presets("ex31"),
    "ex32": lambda seed=None: run_presets("ex32"),
    "ex33": lambda seed=None: run_presets("ex33"),
}


def run_suite(statement: str, seed: int = DEFAULT_SEED) -> VerificationReport:
    if statement not in SUITES:
        raise UsageError(f"unknown statement {statement!r}; choose from {', '.join(STATEMENTS)}")
    return SUITES[statement](seed=seed)
