"""CSV and JSON matrix files.

Reals are written with 17 significant digits so reading back gives the
same doubles bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import UsageError
from .matrix import SymMatrix


def _fmt(x: float) -> str:
    return "%.17g" % x


def matrix_to_csv(a: SymMatrix) -> str:
    return "".join(",".join(_fmt(x) for x in row) + "\n" for row in a.entries)


def matrix_to_json(a: SymMatrix) -> str:
    rows = ", ".join("[" + ", ".join(_fmt(x) for x in row) + "]" for row in a.entries)
    head = {
        "n": a.n,
        "kind": a.kind,
        "set": list(a.set) if a.set is not None else None,
        "fn": a.fn,
    }
    return json.dumps(head)[:-1] + f', "entries": [{rows}]}}\n'


def emit_matrix(a: SymMatrix, fmt: str = "csv") -> str:
    if fmt == "csv":
        return matrix_to_csv(a)
    if fmt == "json":
        return matrix_to_json(a)
    raise UsageError(f"unknown matrix format {fmt!r}")


def matrix_from_csv(text: str) -> SymMatrix:
    rows = [line for line in text.splitlines() if line.strip()]
    try:
        data = [[float(tok) for tok in line.split(",")] for line in rows]
    except ValueError as exc:
        raise UsageError(f"bad CSV matrix: {exc}") from None
    if not data or any(len(r) != len(data) for r in data):
        raise UsageError("CSV matrix must be square and non-empty")
    return SymMatrix(np.array(data))


def matrix_from_json(text: str) -> SymMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON matrix: {exc.msg}") from None
    if not isinstance(doc, dict) or "entries" not in doc:
        raise UsageError("JSON matrix needs an 'entries' field")
    try:
        entries = np.array(doc["entries"], dtype=float)
    except (TypeError, ValueError):
        raise UsageError("JSON matrix entries must be a list of numeric rows") from None
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise UsageError(f"JSON matrix entries must be square, got shape {entries.shape}")
    if "n" in doc and doc["n"] != entries.shape[0]:
        raise UsageError(f"'n' = {doc['n']} disagrees with {entries.shape[0]} rows")
    s = doc.get("set")
    return SymMatrix(entries, doc.get("kind"), tuple(s) if s is not None else None, doc.get("fn"))


def read_matrix(path: str | Path) -> SymMatrix:
    """Load a matrix; ``.json`` files (or text starting with ``{``) are JSON, else CSV."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"{path}: cannot read matrix file ({exc.strerror})") from None
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return matrix_from_json(text)
    return matrix_from_csv(text)
