"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class CausalSpecError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CausalSpecError):
    """Syntax or document-invariant violation, annotated with a position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(message)

    def __str__(self) -> str:
        base = super().__str__()
        if self.line:
            return f"{self.line}:{self.column}: {base}"
        return base


class CycleError(CausalSpecError):
    """The declared edges contain a directed cycle.

    ``witness`` is a node sequence starting and ending at the same name.
    """

    def __init__(self, witness: list[str]):
        self.witness = list(witness)
        super().__init__("cycle detected: " + " -> ".join(self.witness))


class UnknownNodeError(CausalSpecError):
    """A query referenced a node name that the graph does not declare."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown node: {name!r}")


class PathLimitError(CausalSpecError):
    """Path enumeration exceeded the configured cap."""

    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"path enumeration exceeded {limit} paths")


class RoleError(CausalSpecError):
    """An operation needed an exposure/outcome role that is not declared."""


class ScmError(CausalSpecError):
    """Invalid structural-equation definition."""


class CiTestError(CausalSpecError):
    """A conditional-independence test could not be computed."""


class MonitorError(CausalSpecError):
    """A stream sample was unusable (missing variable, non-finite value)."""
