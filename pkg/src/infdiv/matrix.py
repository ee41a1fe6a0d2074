"""GCD/LCM matrices, Hadamard powers and PSD / infinite-divisibility decisions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import ArithFn, Session
from .eigen import OFF_REL, jacobi_eigvalsh
from .errors import (BracketError, ContractError, DomainError, ModeError, NonMonotoneError,
                     UsageError)
from .sets import IntegerSet, gcd_pair, lcm_pair

SYM_REL = 1e-12
PSD_REL = 1e-9
DEFAULT_GRID = (0.0, 4.0, 0.05)
BATCH = 20000


class MatrixKind(enum.Enum):
    GCD = "gcd"
    RLCM = "rlcm"
    RATIO = "ratio"


@dataclass(frozen=True)
class SymMatrix:
    """Dense real symmetric matrix, optionally tagged with its provenance."""

    entries: np.ndarray
    kind: str | None = None
    set: tuple[int, ...] | None = None
    fn: str | None = None

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ContractError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ContractError("matrix entries must be finite")
        asym = np.max(np.abs(a - a.T))
        if asym > SYM_REL * max(1.0, np.max(np.abs(a))):
            raise ContractError(f"matrix is not symmetric (max |a_ij - a_ji| = {asym:.3g})")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def norm_inf(self) -> float:
        return float(np.max(np.sum(np.abs(self.entries), axis=1)))

    def with_entries(self, entries) -> "SymMatrix":
        return SymMatrix(entries, self.kind, self.set, self.fn)


def as_sym(a) -> SymMatrix:
    return a if isinstance(a, SymMatrix) else SymMatrix(a)


def build_matrix(f: ArithFn, s: IntegerSet, kind: MatrixKind | str,
                 session: Session | None = None) -> SymMatrix:
    """``f(gcd)``, ``1/f(lcm)`` or ``f(gcd)/f(lcm)`` over pairs of ``s``.

    A reciprocal of zero is taken as zero.
    """
    kind = MatrixKind(kind)
    session = session or Session()
    xs = s.elements
    n = len(xs)
    a = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            if kind is MatrixKind.GCD:
                v = session.value(f, gcd_pair(xs[i], xs[j]))
            else:
                den = session.value(f, lcm_pair(xs[i], xs[j]))
                inv = 0.0 if den == 0 else 1.0 / den
                v = inv if kind is MatrixKind.RLCM else session.value(f, gcd_pair(xs[i], xs[j])) * inv
            a[i, j] = a[j, i] = v
    return SymMatrix(a, kind.value, xs, str(f))


def _check_nonneg(a: np.ndarray):
    neg = np.argwhere(a < 0)
    if len(neg):
        i, j = neg[0]
        raise DomainError(f"Hadamard power needs nonnegative entries; entry ({i}, {j}) = {a[i, j]}")


def hadamard_power(a, r: float) -> SymMatrix:
    """Entrywise ``a_ij**r`` with ``0**0 = 1``."""
    a = as_sym(a)
    if r < 0:
        raise DomainError(f"exponent must be nonnegative, got {r}")
    _check_nonneg(a.entries)
    return a.with_entries(np.power(a.entries, float(r)))


def diag_scale(a, w) -> SymMatrix:
    a = as_sym(a)
    w = np.asarray(w, dtype=float)
    if w.shape != (a.n,):
        raise ContractError(f"scaling vector has length {w.size}, matrix has n = {a.n}")
    return a.with_entries(w[:, None] * a.entries * w[None, :])


def determinant(a) -> float:
    """Determinant by LU with partial pivoting."""
    return float(np.linalg.det(as_sym(a).entries))


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    min_eigenvalue: float
    tolerance: float
    method: str = "jacobi-eigen"

    def to_dict(self) -> dict:
        return {
            "is_psd": self.is_psd,
            "min_eigenvalue": self.min_eigenvalue,
            "tolerance": self.tolerance,
            "method": self.method,
        }


def psd_threshold(a: SymMatrix, tol: float | None = None) -> float:
    """Absolute eigenvalue slack: ``tol * max(1, ||A||_inf)`` with ``tol = 1e-9 n`` by default."""
    if tol is None:
        tol = PSD_REL * a.n
    return tol * max(1.0, a.norm_inf())


def psd_check(a, tol: float | None = None) -> PsdVerdict:
    a = as_sym(a)
    thresh = psd_threshold(a, tol)
    lam = float(jacobi_eigvalsh(a.entries, OFF_REL)[0])
    return PsdVerdict(lam >= -thresh, lam, thresh)


def _min_eigs_over_r(a: np.ndarray, rs, tol: float | None) -> tuple[np.ndarray, np.ndarray]:
    """Smallest eigenvalue and PSD threshold of ``a**r`` for each ``r``."""
    rs = np.asarray(rs, dtype=float)
    n = a.shape[0]
    if tol is None:
        tol = PSD_REL * n
    lam = np.empty(rs.size)
    thr = np.empty(rs.size)
    for lo in range(0, rs.size, BATCH):
        chunk = rs[lo:lo + BATCH]
        stack = np.power(a[None, :, :], chunk[:, None, None])
        lam[lo:lo + BATCH] = jacobi_eigvalsh(stack)[:, 0]
        thr[lo:lo + BATCH] = tol * np.maximum(1.0, np.max(np.sum(np.abs(stack), axis=2), axis=1))
    return lam, thr


def grid_points(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0 or hi < lo or lo < 0:
        raise UsageError(f"invalid exponent grid {lo}:{hi}:{step}")
    k = int(math.floor((hi - lo) / step + 1e-9))
    pts = lo + step * np.arange(k + 1)
    return np.round(pts, 12)


class InfDivMode(enum.Enum):
    EXACT = "exact-log"
    GRID = "grid-probe"
    BISECT = "bisection"


class Verdict(enum.Enum):
    INFDIV = "infinitely-divisible"
    NOT_INFDIV = "not-infinitely-divisible"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class InfDivVerdict:
    """Outcome of an infinite-divisibility test.

    Grid modes can only refute: with no failing exponent the verdict is
    ``inconclusive`` and ``evidence`` holds every probed point.  On
    failure ``critical_r`` is the least grid exponent from which every
    later point passes (refined by bisection in that mode), or ``None``
    if the last grid point fails.
    """

    mode: InfDivMode
    verdict: Verdict
    critical_r: float | None
    evidence: tuple[tuple[float, float], ...]
    tolerance: float
    failures: tuple[float, ...] = field(default=())
    log_min_eigenvalue: float | None = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "verdict": self.verdict.value,
            "critical_r": self.critical_r,
            "tolerance": self.tolerance,
            "failures": list(self.failures),
            "log_min_eigenvalue": self.log_min_eigenvalue,
            "evidence": [[r, lam] for r, lam in self.evidence],
        }


def centered_log(a) -> SymMatrix:
    """``P log(A) P`` with ``P = I - J/n``; PSD iff ``log(A)`` is conditionally PSD."""
    a = as_sym(a)
    n = a.n
    p = np.eye(n) - np.full((n, n), 1.0 / n)
    lg = np.log(a.entries)
    m = p @ lg @ p
    return SymMatrix((m + m.T) / 2.0)


def infdiv_check(a, mode: InfDivMode | str = InfDivMode.GRID, grid=DEFAULT_GRID,
                 tol: float | None = None) -> InfDivVerdict:
    """Decide whether every Hadamard power ``A∘r``, ``r >= 0``, is PSD.

    ``exact-log`` needs strictly positive entries: ``A`` is infinitely
    divisible iff it is PSD and ``log A`` is conditionally PSD.  A
    negative answer is reported only together with a failing exponent
    found by probing, else the verdict is ``inconclusive``.  ``grid-probe``
    checks ``A∘r`` on ``grid = (lo, hi, step)``; ``bisection`` does the
    same and refines the threshold after a failure.
    """
    a = as_sym(a)
    mode = InfDivMode(mode)
    _check_nonneg(a.entries)
    if mode is InfDivMode.EXACT:
        if np.any(a.entries == 0):
            i, j = np.argwhere(a.entries == 0)[0]
            raise ModeError(
                f"exact-log mode needs strictly positive entries; entry ({i}, {j}) is zero, use grid-probe"
            )
        base = psd_check(a, tol)
        cl = psd_check(centered_log(a), tol)
        if base.is_psd and cl.is_psd:
            return InfDivVerdict(mode, Verdict.INFDIV, None, ((1.0, base.min_eigenvalue),),
                                 base.tolerance, log_min_eigenvalue=cl.min_eigenvalue)
        # A negative verdict must carry a failing exponent as witness.
        rs = np.unique(np.concatenate([grid_points(*grid), 10.0 ** -np.arange(1, 9)]))
        lam, thr = _min_eigs_over_r(a.entries, rs, tol)
        bad = lam < -thr
        evidence = tuple((float(r), float(v)) for r, v in zip(rs, lam))
        verdict = Verdict.NOT_INFDIV if bad.any() else Verdict.INCONCLUSIVE
        return InfDivVerdict(mode, verdict, None, evidence, float(thr.max()),
                             tuple(float(r) for r in rs[bad]), cl.min_eigenvalue)

    rs = grid_points(*grid)
    lam, thr = _min_eigs_over_r(a.entries, rs, tol)
    ok = lam >= -thr
    evidence = tuple((float(r), float(v)) for r, v in zip(rs, lam))
    failures = tuple(float(r) for r in rs[~ok])
    if ok.all():
        return InfDivVerdict(mode, Verdict.INCONCLUSIVE, None, evidence, float(thr.max()))
    last_bad = int(np.flatnonzero(~ok)[-1])
    critical = None
    if last_bad + 1 < rs.size:
        critical = float(rs[last_bad + 1])
        if mode is InfDivMode.BISECT:
            step = float(rs[1] - rs[0]) if rs.size > 1 else 1.0
            critical = _bisect(a.entries, float(rs[last_bad]), critical, step * 1e-5, tol)
    return InfDivVerdict(mode, Verdict.NOT_INFDIV, critical, evidence, float(thr.max()), failures)


def _bisect(a: np.ndarray, lo: float, hi: float, eps: float, tol) -> float:
    # Invariant: a**lo is not PSD, a**hi is.
    while hi - lo > eps / 2:
        mid = 0.5 * (lo + hi)
        lam, thr = _min_eigs_over_r(a, [mid], tol)
        if lam[0] >= -thr[0]:
            hi = mid
        else:
            lo = mid
    return hi


def min_psd_exponent(a, r_lo: float, r_hi: float, eps: float = 1e-6,
                     tol: float | None = None) -> float:
    """Least ``r`` in ``[r_lo, r_hi]`` with ``A∘r`` PSD, to within ``eps``.

    A guard scan with step ``10 eps`` must show non-PSD points followed
    only by PSD points; otherwise :class:`BracketError` (no sign change)
    or :class:`NonMonotoneError` is raised.  When ``A`` has zero entries
    the point ``r = 0`` is left out of the scan, since ``A∘0`` is the
    all-ones matrix regardless of ``A``.
    """
    a = as_sym(a)
    _check_nonneg(a.entries)
    if not (eps > 0 and 0 <= r_lo < r_hi):
        raise BracketError(f"invalid bracket [{r_lo}, {r_hi}] with eps {eps}")
    step = 10 * eps
    k = int(math.floor((r_hi - r_lo) / step))
    rs = r_lo + step * np.arange(k + 1)
    if rs[-1] < r_hi:
        rs = np.append(rs, r_hi)
    if r_lo == 0 and np.any(a.entries == 0):
        rs = rs[1:]
    lam, thr = _min_eigs_over_r(a.entries, rs, tol)
    first_ok = _scan_threshold(rs, lam >= -thr, r_lo, r_hi)
    return _bisect(a.entries, float(rs[first_ok - 1]), float(rs[first_ok]), eps, tol)


def _scan_threshold(rs, ok, r_lo, r_hi) -> int:
    """Index of the first PSD scan point, checking the scan is F...F T...T."""
    if ok[0]:
        raise BracketError(f"A∘r is already PSD at r = {rs[0]:.6g}; no threshold in [{r_lo}, {r_hi}]")
    if not ok[-1]:
        raise BracketError(f"A∘r is not PSD at r = {r_hi}; no threshold in [{r_lo}, {r_hi}]")
    first_ok = int(np.argmax(ok))
    if not ok[first_ok:].all():
        bad = rs[first_ok:][~ok[first_ok:]][0]
        raise NonMonotoneError(
            f"PSD region is not upward closed: PSD at r = {rs[first_ok]:.6g} but not at r = {bad:.6g}"
        )
    return first_ok
