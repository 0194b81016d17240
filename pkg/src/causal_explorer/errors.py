"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Bad user input: unknown names, invalid sizes, malformed files."""


class ParseError(InputError):
    """A text file could not be parsed.  ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class NumericalError(ArithmeticError):
    """A numerical routine failed (singular system, non-convergence)."""
