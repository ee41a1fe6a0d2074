"""Integer sets, divisor closures, class membership and alpha vectors."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .arith import ArithFn, Session, _divisors, check_bound
from .errors import BoundError, UsageError

DEFAULT_CLASS_TOL = 1e-9


@dataclass(frozen=True)
class IntegerSet:
    """Distinct positive integers, kept in ascending order."""

    elements: tuple[int, ...]

    def __post_init__(self):
        elems = [int(x) for x in self.elements]
        if not elems:
            raise UsageError("an integer set needs at least one element")
        if len(set(elems)) != len(elems):
            raise UsageError(f"set elements must be distinct: {elems}")
        for x in elems:
            check_bound(x)
        object.__setattr__(self, "elements", tuple(sorted(elems)))

    @classmethod
    def of(cls, xs: Iterable[int]) -> "IntegerSet":
        return cls(tuple(xs))

    @classmethod
    def parse(cls, text: str) -> "IntegerSet":
        """Parse ``"6,10,15"``."""
        try:
            xs = [int(tok) for tok in text.split(",")]
        except ValueError:
            raise UsageError(f"set must be comma-separated decimal integers: {text!r}") from None
        return cls(tuple(xs))

    @classmethod
    def load(cls, path: str | Path) -> "IntegerSet":
        """Read a JSON array of integers."""
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"{path}: cannot read set file: {exc}") from exc
        if not isinstance(doc, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in doc
        ):
            raise UsageError(f"{path}: set file must hold a JSON array of integers")
        return cls(tuple(doc))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    def check_lcm_bound(self):
        """Raise :class:`BoundError` if some pairwise lcm exceeds the bound."""
        xs = self.elements
        for i, a in enumerate(xs):
            for b in xs[i:]:
                lcm_pair(a, b)


def gcd_pair(a: int, b: int) -> int:
    if a < 1 or b < 1:
        raise UsageError(f"gcd needs positive integers, got {a}, {b}")
    return math.gcd(a, b)


def lcm_pair(a: int, b: int) -> int:
    if a < 1 or b < 1:
        raise UsageError(f"lcm needs positive integers, got {a}, {b}")
    out = a // math.gcd(a, b) * b
    try:
        check_bound(out)
    except BoundError:
        raise BoundError(f"lcm({a}, {b}) = {out} exceeds the 2**48 factorization bound") from None
    return out


@dataclass(frozen=True)
class DivisorClosure:
    source: IntegerSet
    divisors: tuple[int, ...]


def divisor_closure(s: IntegerSet) -> DivisorClosure:
    ds = set()
    for x in s:
        ds.update(_divisors(x))
    return DivisorClosure(s, tuple(sorted(ds)))


@dataclass(frozen=True)
class ClassReport:
    """Evidence for membership of ``f`` in C_S (or the strict class when
    ``strict``).  ``violations`` lists ``(d, (f*mu)(d))`` pairs."""

    strict: bool
    member: bool
    checked: int
    violations: tuple[tuple[int, float], ...]
    tol: float

    @property
    def class_name(self) -> str:
        return "C~_S" if self.strict else "C_S"

    def to_dict(self) -> dict:
        return {
            "class": self.class_name,
            "member": self.member,
            "checked": self.checked,
            "violations": [[d, v] for d, v in self.violations],
            "tol": self.tol,
        }


def class_membership(
    f: ArithFn,
    s: IntegerSet,
    strict: bool = False,
    tol: float = DEFAULT_CLASS_TOL,
    session: Session | None = None,
) -> ClassReport:
    """Test the sign of ``(f*mu)(d)`` over the divisor closure of ``s``.

    The tolerance is absolute on the scale of the largest ``|f|`` value
    entering each value: non-strict accepts ``>= -tol*scale``, strict
    demands ``> tol*scale`` with ``scale = max(1, max |f(e)|)``.
    """
    if tol < 0:
        raise UsageError("tolerance must be nonnegative")
    session = session or Session()
    closure = divisor_closure(s)
    bad = []
    for d in closure.divisors:
        v, scale = session.mobius_conv(f, d)
        thresh = tol * max(1.0, scale)
        ok = v > thresh if strict else v >= -thresh
        if not ok:
            bad.append((d, v))
    return ClassReport(strict, not bad, len(closure.divisors), tuple(bad), tol)


@dataclass(frozen=True)
class AlphaVector:
    elements: tuple[int, ...]
    values: tuple[float, ...]
    contributors: tuple[tuple[int, ...], ...]

    def product(self) -> float:
        return math.prod(self.values)

    def to_dict(self) -> dict:
        return {
            "set": list(self.elements),
            "alpha": list(self.values),
            "contributors": [list(c) for c in self.contributors],
            "product": self.product(),
        }


def alpha_vector(f: ArithFn, s: IntegerSet, session: Session | None = None) -> AlphaVector:
    """Sum of ``(f*mu)(d)`` over divisors of each ``x_k`` dividing no smaller element."""
    session = session or Session()
    xs = s.elements
    values, contrib = [], []
    for k, x in enumerate(xs):
        ds = tuple(d for d in _divisors(x) if all(y % d for y in xs[:k]))
        contrib.append(ds)
        values.append(math.fsum(session.mobius_conv(f, d)[0] for d in ds))
    return AlphaVector(xs, tuple(values), tuple(contrib))
