"""Exception types shared across the engine."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Source position (1-based line/column) of a token or node."""

    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class FodotError(Exception):
    """Base class for all engine errors."""


@dataclass
class Diagnostic:
    message: str
    span: Span = field(default_factory=Span)

    def __str__(self) -> str:
        if self.span.line:
            return f"{self.span}: {self.message}"
        return self.message


class ParseErrors(FodotError):
    """Raised when source text cannot be parsed. Never carries a partial tree."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


class TypeErrors(FodotError):
    """Raised with the complete list of type errors found in a KB."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


# -- structures ---------------------------------------------------------------

class MissingExtension(FodotError):
    pass


class ValueOutsideType(FodotError):
    pass


class IncompleteEnumeration(FodotError):
    pass


class TypeMismatch(FodotError):
    pass


class OverwriteEnumeration(FodotError):
    pass


class NotUserFact(FodotError):
    pass


# -- grounding ----------------------------------------------------------------

class GroundingError(FodotError):
    pass


class InfiniteQuantification(GroundingError):
    pass


class UnstratifiedDefinition(GroundingError):
    pass


# -- solver bridge ------------------------------------------------------------

class SolverSpawnError(FodotError):
    pass


class SolverProtocolError(FodotError):
    pass


class SolverUnknown(FodotError):
    """The solver answered `unknown` (timeout or incompleteness)."""


# -- inference ----------------------------------------------------------------

class Inconsistent(FodotError):
    """Theory plus structure has no models; ask for an explanation instead."""


class NotAConsequence(FodotError):
    pass


class Unbounded(FodotError):
    pass


class TooLarge(FodotError):
    pass


class InconsistentKB(FodotError):
    pass


class ConflictingAssert(FodotError):
    """Rejected edit; carries the minimal explanation of the conflict."""

    def __init__(self, message: str, explanation):
        super().__init__(message)
        self.explanation = explanation


# -- DMN ----------------------------------------------------------------------

class MalformedTable(FodotError):
    pass


class UnknownHitPolicy(FodotError):
    pass


class UnknownSymbol(FodotError):
    pass


class UnboundedInput(FodotError):
    pass
