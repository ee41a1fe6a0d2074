"""Textual syntax for arithmetical functions.

Grammar (whitespace between tokens is ignored)::

    expr := "mu" | "delta" | "one" | "id"
          | "xi(" num ")" | "jordan(" num ")" | "table(" path ")"
          | "conv(" expr "," expr ")" | "cpow(" expr "," int ")"
          | "ppow(" expr "," num ")" | "mupow(" int ")"

``one`` is ``xi(0)``, ``id`` is ``xi(1)`` and ``mupow(d)`` is
``cpow(mu, d)``.  Numbers are plain decimal literals.

>>> to_expr(parse_fn_expr("conv(cpow(id, 2), mupow(1))"))
'conv(cpow(xi(1.0), 2), cpow(mu, 1))'
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .arith import (AffineCombo, ArithFn, Conv, ConvPower, Delta, Jordan, Mu, PointwisePower,
                    Table, Xi, load_table)
from .errors import ParseError

KEYWORDS = ("conv", "cpow", "delta", "id", "jordan", "mu", "mupow", "one", "ppow", "table", "xi")
_WORD = re.compile(r"[A-Za-z_]+")
_NUM = re.compile(r"\d+(?:\.\d+)?")
_INT = re.compile(r"\d+")


class _Parser:
    def __init__(self, text: str, base_dir: Path | None):
        self.text = text
        self.pos = 0
        self.base_dir = base_dir

    def fail(self, expected, at=None):
        at = self.pos if at is None else at
        raise ParseError(self.text, len(self.text[:at].encode()) + 1, expected)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def punct(self, ch):
        self.skip()
        if not self.text.startswith(ch, self.pos):
            self.fail({ch})
        self.pos += 1

    def match(self, regex, label):
        self.skip()
        m = regex.match(self.text, self.pos)
        if not m:
            self.fail({label})
        self.pos = m.end()
        return m.group()

    def expr(self) -> ArithFn:
        self.skip()
        start = self.pos
        m = _WORD.match(self.text, self.pos)
        if not m or m.group() not in KEYWORDS:
            self.fail(KEYWORDS, start)
        word = m.group()
        self.pos = m.end()
        if word == "mu":
            return Mu()
        if word == "delta":
            return Delta()
        if word == "one":
            return Xi(0.0)
        if word == "id":
            return Xi(1.0)
        self.punct("(")
        if word in ("xi", "jordan"):
            x = float(self.match(_NUM, "number"))
            out = Xi(x) if word == "xi" else Jordan(x)
        elif word == "table":
            out = self.table()
        elif word == "mupow":
            out = ConvPower(Mu(), int(self.match(_INT, "integer")))
        else:
            inner = self.expr()
            self.punct(",")
            if word == "conv":
                out = Conv(inner, self.expr())
            elif word == "cpow":
                out = ConvPower(inner, int(self.match(_INT, "integer")))
            else:
                out = PointwisePower(inner, float(self.match(_NUM, "number")))
        self.punct(")")
        return out

    def table(self) -> Table:
        self.skip()
        start = self.pos
        end = self.text.find(")", start)
        if end < 0:
            end = len(self.text)
        raw = self.text[start:end].rstrip()
        if not raw:
            self.fail({"path"}, start)
        self.pos = start + len(raw)
        path = Path(raw)
        if self.base_dir is not None and not path.is_absolute():
            path = self.base_dir / path
        t = load_table(path)
        return Table(t.values, t.default, t.declared, raw)

    def parse(self) -> ArithFn:
        out = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.fail({"end of input"})
        return out


def parse_fn_expr(text: str, base_dir: str | Path | None = None) -> ArithFn:
    """Parse ``text`` into an expression tree.

    Table paths resolve against ``base_dir`` (default: the working
    directory).  Raises :class:`ParseError` with a 1-based byte offset
    and the set of tokens that would have been accepted there.
    """
    return _Parser(text, Path(base_dir) if base_dir is not None else None).parse()


def _num(x: float) -> str:
    return np.format_float_positional(x, unique=True, trim="0")


def to_expr(f: ArithFn, strict: bool = False) -> str:
    """Print ``f`` in the grammar above; parsing the result gives back ``f``.

    Nodes with no surface syntax (affine combinations, tables not loaded
    from a file) raise ``ValueError`` when ``strict``, else print in a
    descriptive non-parseable form.
    """
    rec = lambda g: to_expr(g, strict)  # noqa: E731
    if isinstance(f, Mu):
        return "mu"
    if isinstance(f, Delta):
        return "delta"
    if isinstance(f, Xi):
        return f"xi({_num(f.eps)})"
    if isinstance(f, Jordan):
        return f"jordan({_num(f.eps)})"
    if isinstance(f, Table):
        if f.source is None:
            if strict:
                raise ValueError("table has no source path")
            return "table(<inline>)"
        return f"table({f.source})"
    if isinstance(f, Conv):
        return f"conv({rec(f.left)}, {rec(f.right)})"
    if isinstance(f, ConvPower):
        return f"cpow({rec(f.base)}, {f.l})"
    if isinstance(f, PointwisePower):
        return f"ppow({rec(f.base)}, {_num(f.r)})"
    if isinstance(f, AffineCombo):
        if strict:
            raise ValueError("affine combinations have no surface syntax")
        return "affine(" + ", ".join(f"{c!r}*{rec(g)}" for c, g in f.terms) + ")"
    raise TypeError(f"not an arithmetical function node: {f!r}")
