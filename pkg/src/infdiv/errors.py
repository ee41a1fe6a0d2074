"""Exception hierarchy shared by every module.

The CLI maps these to exit codes: ``UsageError`` subclasses give 2 and
``NumericalError`` subclasses give 3.
"""


class InfDivError(Exception):
    """Base class for all package errors."""


class UsageError(InfDivError, ValueError):
    """Caller broke an input contract (bad syntax, bad file, bad argument)."""


class NumericalError(InfDivError, ArithmeticError):
    """A computation could not be carried out on the given values."""


class BoundError(NumericalError):
    """An integer exceeds the factorization bound."""


class DomainError(NumericalError):
    """A value lies outside the domain of an operation (e.g. negative base)."""


class ModeError(NumericalError):
    """The requested decision mode does not apply to this input."""


class BracketError(NumericalError):
    """An exponent bracket does not straddle the PSD threshold."""


class NonMonotoneError(NumericalError):
    """The PSD region in the exponent is not upward closed on the scan."""


class ContractError(UsageError):
    """A structural precondition failed (asymmetric matrix, non-multiplicative f)."""


class HypothesisError(UsageError):
    """A theorem's hypotheses do not hold, so it makes no claim."""


class TableError(UsageError):
    """A table-function document is malformed."""


class ParseError(UsageError):
    """Syntax error in a function expression.

    ``offset`` is the 1-based byte position of the offending token (the
    length of the text plus one at end of input).
    """

    def __init__(self, text, offset, expected):
        self.text = text
        self.offset = offset
        self.expected = tuple(sorted(expected))
        shown = ", ".join(repr(e) for e in self.expected)
        super().__init__(f"syntax error at offset {offset}: expected one of {shown}")
