"""Arithmetical functions and the Dirichlet algebra.

Functions are immutable expression trees.  Leaves are the Möbius
function, the convolution identity, the power functions ``m -> m**eps``,
generalized Jordan functions and finite tables; inner nodes are Dirichlet
convolution, convolution powers, pointwise powers and affine
combinations.  Trees are evaluated through a :class:`Session`, which
memoizes values per ``(node, m)``.

>>> evaluate(dirichlet_conv(Xi(1.0), Mu()), 6)
2.0
>>> evaluate(conv_power(Xi(0.0), 2), 4)
3.0
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import BoundError, ContractError, DomainError, TableError

FACTOR_BOUND = 2**48
TRIAL_LIMIT = 2**24


# --------------------------------------------------------------------------
# integers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if math.prod(p**e for p, e in self.factors) != self.value:
            raise ValueError("factors do not multiply to value")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)) or any(e < 1 for _, e in self.factors):
            raise ValueError("primes must be strictly increasing with exponents >= 1")

    @property
    def is_prime_power(self) -> bool:
        return len(self.factors) == 1

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factors]


def check_bound(m: int) -> int:
    if isinstance(m, bool) or not isinstance(m, int):
        raise TypeError(f"expected an integer, got {m!r}")
    if m < 1 or m > FACTOR_BOUND:
        raise BoundError(f"{m} outside [1, 2**48]; trial division is limited to 2**48")
    return m


@lru_cache(maxsize=65536)
def _factor(m: int) -> tuple[tuple[int, int], ...]:
    out = []
    for p in (2, 3):
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    p, step = 5, 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def factorize(m: int) -> Factorization:
    """Prime factorization of ``1 <= m <= 2**48`` by trial division.

    >>> factorize(360).factors
    ((2, 3), (3, 2), (5, 1))
    """
    check_bound(m)
    return Factorization(m, _factor(m))


@lru_cache(maxsize=65536)
def _divisors(m: int) -> tuple[int, ...]:
    divs = [1]
    for p, e in _factor(m):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return tuple(sorted(divs))


def divisors(m: int) -> list[int]:
    """All positive divisors of ``m`` in ascending order."""
    check_bound(m)
    return list(_divisors(m))


def is_prime(p: int) -> bool:
    return p >= 2 and _factor(p) == ((p, 1),)


def mobius(m: int) -> int:
    fac = _factor(m)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


# --------------------------------------------------------------------------
# expression tree
# --------------------------------------------------------------------------

class Mult(enum.Enum):
    """Tri-state multiplicativity flag."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class ArithFn:
    """Base class of expression nodes.  Calling a node evaluates it."""

    __slots__ = ()

    @property
    def multiplicative(self) -> Mult:
        raise NotImplementedError

    def __call__(self, m: int) -> float:
        return evaluate(self, m)

    def __str__(self):
        from .dsl import to_expr

        return to_expr(self)


@dataclass(frozen=True)
class Mu(ArithFn):
    @property
    def multiplicative(self):
        return Mult.YES


@dataclass(frozen=True)
class Delta(ArithFn):
    @property
    def multiplicative(self):
        return Mult.YES


@dataclass(frozen=True)
class Xi(ArithFn):
    """``m -> m**eps``."""

    eps: float

    def __post_init__(self):
        object.__setattr__(self, "eps", float(self.eps))
        if not self.eps >= 0 or math.isinf(self.eps):
            raise ValueError(f"Xi exponent must be a finite nonnegative real, got {self.eps}")

    @property
    def multiplicative(self):
        return Mult.YES


@dataclass(frozen=True)
class Jordan(ArithFn):
    """Generalized Jordan function, the convolution of ``Xi(eps)`` with ``Mu``.

    Any ``eps >= 0`` is accepted; whether the function lies in a given
    class is decided by :func:`infdiv.sets.class_membership`.
    """

    eps: float

    def __post_init__(self):
        object.__setattr__(self, "eps", float(self.eps))
        if not self.eps >= 0 or math.isinf(self.eps):
            raise ValueError(f"Jordan exponent must be a finite nonnegative real, got {self.eps}")

    @property
    def multiplicative(self):
        return Mult.YES


@dataclass(frozen=True)
class Table(ArithFn):
    """Finitely supported values over a constant default.

    ``declared`` is the multiplicativity the caller vouches for; it is
    never verified.  ``source`` remembers the file the table came from so
    the expression printer can refer back to it.
    """

    values: tuple[tuple[int, float], ...]
    default: float = 0.0
    declared: Mult = Mult.UNKNOWN
    source: str | None = None
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        items = tuple(sorted((int(k), float(v)) for k, v in dict(self.values).items()))
        for k, v in items:
            if k < 1:
                raise ValueError(f"table keys must be positive integers, got {k}")
            if not math.isfinite(v):
                raise ValueError(f"table value at {k} is not finite")
        if not math.isfinite(self.default):
            raise ValueError("table default is not finite")
        object.__setattr__(self, "values", items)
        object.__setattr__(self, "default", float(self.default))
        object.__setattr__(self, "_lookup", dict(items))

    @classmethod
    def from_mapping(cls, values: Mapping[int, float], default=0.0, multiplicative=None, source=None):
        declared = {True: Mult.YES, False: Mult.NO, None: Mult.UNKNOWN}[multiplicative]
        return cls(tuple(values.items()), default, declared, source)

    def lookup(self, m: int) -> float:
        return self._lookup.get(m, self.default)

    @property
    def multiplicative(self):
        return self.declared


@dataclass(frozen=True)
class Conv(ArithFn):
    left: ArithFn
    right: ArithFn

    @property
    def multiplicative(self):
        if self.left.multiplicative is Mult.YES and self.right.multiplicative is Mult.YES:
            return Mult.YES
        return Mult.UNKNOWN


@dataclass(frozen=True)
class ConvPower(ArithFn):
    base: ArithFn
    l: int

    def __post_init__(self):
        if isinstance(self.l, bool) or not isinstance(self.l, int) or self.l < 0:
            raise ValueError(f"convolution power must be a nonnegative integer, got {self.l!r}")

    @property
    def multiplicative(self):
        if self.l == 0:
            return Mult.YES
        return Mult.YES if self.base.multiplicative is Mult.YES else Mult.UNKNOWN


@dataclass(frozen=True)
class PointwisePower(ArithFn):
    base: ArithFn
    r: float

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))
        if not self.r >= 0 or math.isinf(self.r):
            raise ValueError(f"pointwise exponent must be a finite nonnegative real, got {self.r}")

    @property
    def multiplicative(self):
        if self.r == 0:
            return Mult.YES
        return Mult.YES if self.base.multiplicative is Mult.YES else Mult.UNKNOWN


@dataclass(frozen=True)
class AffineCombo(ArithFn):
    terms: tuple[tuple[float, ArithFn], ...]
    declared: Mult = Mult.UNKNOWN

    def __post_init__(self):
        terms = tuple((float(c), f) for c, f in self.terms)
        if not terms:
            raise ValueError("affine combination needs at least one term")
        object.__setattr__(self, "terms", terms)

    @property
    def multiplicative(self):
        return self.declared


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def dirichlet_conv(f: ArithFn, g: ArithFn) -> ArithFn:
    return Conv(f, g)


def conv_power(f: ArithFn, l: int) -> ArithFn:
    """``l``-fold Dirichlet convolution of ``f``; ``l = 0`` is the identity."""
    return ConvPower(f, l)


def pointwise_power(f: ArithFn, r: float) -> ArithFn:
    return PointwisePower(f, r)


def affine_combo(terms: Iterable[tuple[float, ArithFn]], multiplicative: bool | None = None) -> ArithFn:
    declared = {True: Mult.YES, False: Mult.NO, None: Mult.UNKNOWN}[multiplicative]
    return AffineCombo(tuple(terms), declared)


def conv_all(fns: Sequence[ArithFn]) -> ArithFn:
    """Left-nested convolution of a non-empty sequence."""
    if not fns:
        raise ValueError("need at least one function")
    out = fns[0]
    for g in fns[1:]:
        out = Conv(out, g)
    return out


def load_table(path: str | Path) -> Table:
    """Read a table function from its JSON document.

    Schema: ``{"values": {"<m>": real, ...}, "default": real,
    "multiplicative": bool}`` with ``multiplicative`` optional.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise TableError(f"{path}: cannot read table file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise TableError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return table_from_doc(doc, source=str(path))


def table_from_doc(doc, source: str | None = None) -> Table:
    where = source or "<table>"
    if not isinstance(doc, dict):
        raise TableError(f"{where}: top level must be an object")
    unknown = set(doc) - {"values", "default", "multiplicative"}
    if unknown:
        raise TableError(f"{where}: unknown keys {sorted(unknown)}")
    if "values" not in doc or "default" not in doc:
        raise TableError(f"{where}: 'values' and 'default' are required")
    raw = doc["values"]
    if not isinstance(raw, dict):
        raise TableError(f"{where}: 'values' must be an object")
    values = {}
    for key, val in raw.items():
        if not key.isdigit() or int(key) < 1:
            raise TableError(f"{where}: key {key!r} is not a decimal positive integer")
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise TableError(f"{where}: value at {key} is not a number")
        values[int(key)] = float(val)
    default = doc["default"]
    if isinstance(default, bool) or not isinstance(default, (int, float)):
        raise TableError(f"{where}: 'default' is not a number")
    mult = doc.get("multiplicative", False)
    if not isinstance(mult, bool):
        raise TableError(f"{where}: 'multiplicative' must be a boolean")
    try:
        return Table.from_mapping(values, float(default), multiplicative=True if mult else None,
                                  source=source)
    except ValueError as exc:
        raise TableError(f"{where}: {exc}") from exc


def table_to_doc(t: Table) -> dict:
    doc = {"values": {str(k): v for k, v in t.values}, "default": t.default}
    if t.declared is Mult.YES:
        doc["multiplicative"] = True
    return doc


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

class Session:
    """Memoizing evaluator.

    Values are cached per (node identity, m).  Nodes are pinned for the
    session's lifetime so identities are never reused.  With ``fast=True``
    (the default) convolution nodes flagged multiplicative are evaluated
    as a product over the prime powers of ``m``.
    """

    def __init__(self, fast: bool = True):
        self.fast = fast
        self._cache: dict[tuple[int, int], float] = {}
        self._pins: dict[int, ArithFn] = {}

    def value(self, f: ArithFn, m: int) -> float:
        key = (id(f), m)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self._pins[id(f)] = f
        v = self._compute(f, m)
        self._cache[key] = v
        return v

    def mobius_conv(self, f: ArithFn, m: int) -> tuple[float, float]:
        """``(f*mu)(m)`` and the largest ``|f(d)|`` over ``d | m`` feeding it."""
        if self.fast and f.multiplicative is Mult.YES and m > 1:
            total, scale = 1.0, 0.0
            for p, e in _factor(m):
                q = p**e
                hi, lo = self.value(f, q), self.value(f, q // p)
                total *= hi - lo
                scale = max(scale, abs(hi), abs(lo))
            return total, scale
        total, scale = 0.0, 0.0
        for d in _divisors(m):
            mu = mobius(m // d)
            v = self.value(f, d)
            scale = max(scale, abs(v))
            if mu:
                total += mu * v
        return total, scale

    def _multiplicative_split(self, f, m):
        if self.fast and m > 1 and f.multiplicative is Mult.YES:
            fac = _factor(m)
            if len(fac) > 1:
                out = 1.0
                for p, e in fac:
                    out *= self.value(f, p**e)
                return out
        return None

    def _compute(self, f: ArithFn, m: int) -> float:
        if isinstance(f, Xi):
            return float(m) ** f.eps
        if isinstance(f, Mu):
            return float(mobius(m))
        if isinstance(f, Delta):
            return 1.0 if m == 1 else 0.0
        if isinstance(f, Jordan):
            out = 1.0
            for p, e in _factor(m):
                out *= float(p) ** (e * f.eps) - float(p) ** ((e - 1) * f.eps)
            return out
        if isinstance(f, Table):
            return f.lookup(m)
        if isinstance(f, PointwisePower):
            if f.r == 0:
                return 1.0
            b = self.value(f.base, m)
            if b < 0 and not f.r.is_integer():
                raise DomainError(
                    f"negative value {b} of {f.base} at m={m} under fractional power {f.r}"
                )
            return b**f.r
        if isinstance(f, AffineCombo):
            return math.fsum(c * self.value(g, m) for c, g in f.terms)
        if isinstance(f, Conv):
            split = self._multiplicative_split(f, m)
            if split is not None:
                return split
            return math.fsum(
                self.value(f.left, d) * self.value(f.right, m // d) for d in _divisors(m)
            )
        if isinstance(f, ConvPower):
            if f.l == 0:
                return 1.0 if m == 1 else 0.0
            if f.l == 1:
                return self.value(f.base, m)
            split = self._multiplicative_split(f, m)
            if split is not None:
                return split
            prev = self._power_node(f.base, f.l - 1)
            return math.fsum(
                self.value(prev, d) * self.value(f.base, m // d) for d in _divisors(m)
            )
        raise TypeError(f"not an arithmetical function node: {f!r}")

    def _power_node(self, base, l):
        # Canonical lower-power node per (base, l) so its cache entries are shared.
        key = ("pow", id(base), l)
        node = self._pins.get(key)
        if node is None:
            node = ConvPower(base, l)
            self._pins[key] = node
        return node


def evaluate(f: ArithFn, m: int, session: Session | None = None) -> float:
    """Value of ``f`` at ``m``.

    Raises :class:`BoundError` outside ``[1, 2**48]`` and
    :class:`DomainError` when a fractional pointwise power meets a
    negative value.
    """
    check_bound(m)
    return (session or Session()).value(f, m)


def mobius_conv_prime_power(f: ArithFn, p: int, e: int) -> float:
    """``(f*mu)(p**e) = f(p**e) - f(p**(e-1))`` for multiplicative ``f``."""
    if f.multiplicative is not Mult.YES:
        raise ContractError(f"{f} is not known to be multiplicative")
    if not is_prime(p):
        raise ContractError(f"{p} is not prime")
    if e < 1:
        raise ContractError(f"exponent must be >= 1, got {e}")
    s = Session()
    check_bound(p**e)
    return s.value(f, p**e) - s.value(f, p ** (e - 1))
