"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to.
"""
from __future__ import annotations


class HRGError(Exception):
    exit_code = 2


class GraphError(HRGError):
    """Malformed graph operation: unknown label, missing edge, type mismatch."""


class GrammarError(HRGError):
    """Semantic error in a grammar (unknown symbol, arity mismatch, duplicate id)."""


class ParseError(GrammarError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class NotIsolatedNodeBounded(HRGError):
    """The grammar derives graphs with unboundedly many isolated nodes."""

    exit_code = 3

    def __init__(self, message: str, stage: str, qualifier: str = "structural"):
        super().__init__(f"{stage}: {message} [{qualifier}]")
        self.stage = stage
        self.qualifier = qualifier


class CapExceeded(HRGError):
    exit_code = 4


class EmptyLanguage(HRGError):
    exit_code = 5


class PreconditionError(HRGError):
    """A checker was called on a grammar that does not meet its precondition."""

    exit_code = 1
