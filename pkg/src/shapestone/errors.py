"""Exception types shared across the package."""

from __future__ import annotations


class ShapestoneError(Exception):
    """Base class for all errors raised by this package."""


class TokenError(ShapestoneError, ValueError):
    """A name token violates the lexical rules."""


class GraphFormatError(ShapestoneError, ValueError):
    """The line-oriented graph format could not be parsed."""


class ParseError(ShapestoneError, ValueError):
    """Surface syntax for paths, shapes, or schemas could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + where)
        self.line = line
        self.column = column


class EvalError(ShapestoneError, ValueError):
    """Evaluation hit an unresolved name or a violated precondition."""


class UndefinedShapeNameError(ShapestoneError, ValueError):
    """A schema document references a shape name no rule defines."""


class StringBudgetError(ShapestoneError, RuntimeError):
    """String decomposition exceeded the configured size cap.

    Signals combinatorial blow-up of the decomposition, not incorrectness.
    """

    def __init__(self, count: int, cap: int):
        super().__init__(f"string decomposition exceeded cap: {count} > {cap}")
        self.count = count
        self.cap = cap


class NotStratifiedError(ShapestoneError, ValueError):
    """A program recurses through negation."""

    def __init__(self, cycle: tuple[str, ...]):
        super().__init__(
            "program is not stratified: negative cycle through "
            + ", ".join(sorted(cycle))
        )
        self.cycle = tuple(sorted(cycle))


class RewriteError(ShapestoneError, ValueError):
    """The target-based rewrite does not apply to this schema."""


class ConformanceInternalError(ShapestoneError, RuntimeError):
    """The per-inclusion report and the validation shape disagreed.

    Both routes are always computed; a mismatch means an engine bug.
    """
