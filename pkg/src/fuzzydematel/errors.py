"""Exception types raised by the toolkit.

Everything derives from :class:`DematelError` so callers (and the CLI) can
separate domain failures from I/O failures with a single ``except``.
"""

from __future__ import annotations


class DematelError(ValueError):
    """Base class for all domain and validation failures."""


class UnknownTermError(DematelError):
    def __init__(self, term, available):
        self.term = term
        self.available = tuple(available)
        super().__init__(
            f"unknown linguistic term {term!r}; available terms: {', '.join(self.available)}"
        )


class DimensionMismatchError(DematelError):
    pass


class FactorSetMismatchError(DimensionMismatchError):
    pass


class EmptyInputError(DematelError):
    pass


class DiagonalError(DematelError):
    """A diagonal entry that should be zero is not."""

    def __init__(self, index, value, factor_id=None, context=""):
        self.index = index
        self.value = value
        self.factor_id = factor_id
        where = f"[{factor_id}][{factor_id}]" if factor_id else f"({index}, {index})"
        prefix = f"{context}: " if context else ""
        super().__init__(f"{prefix}nonzero diagonal entry {value!r} at cell {where}")


class DegenerateInputError(DematelError):
    pass


class NonConvergentError(DematelError):
    pass


class ParseError(DematelError):
    """Malformed input file; carries a 1-based line and column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if isinstance(line, str):
            loc = line + ": "
        elif line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(f"{loc}{message}")


class OutOfRangeError(ParseError):
    pass


class StageError(DematelError):
    """Wraps a failure inside :func:`run_pipeline` with the stage that raised it."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")
