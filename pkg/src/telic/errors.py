"""Error hierarchy.

Every user-visible failure carries a stable ``code`` string; the surface
language's ``fail`` declarations match on these codes, so the set below is a
closed enumeration as far as `.tel` files are concerned.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Span:
    file: str
    line: int  # 1-based
    col: int  # 1-based
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"

    def covers(self, other: "Span") -> bool:
        if (other.line, other.col) < (self.line, self.col):
            return False
        return (other.end_line, other.end_col) <= (self.end_line, self.end_col)


class TelicError(Exception):
    """Base for all checker errors; ``code`` is the fail-class name."""

    code = "Error"

    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def with_span(self, span: Span | None) -> "TelicError":
        if self.span is None and span is not None:
            self.span = span
        return self


class ParseError(TelicError):
    code = "ParseError"


class IllegalCharacter(ParseError):
    code = "IllegalCharacter"


class KernelError(TelicError):
    pass


class UnboundVariable(KernelError):
    code = "UnboundVariable"


class UnknownConstant(KernelError):
    code = "UnknownConstant"


class NotAFunction(KernelError):
    code = "NotAFunction"


class NotAPair(KernelError):
    code = "NotAPair"


class UniverseMismatch(KernelError):
    code = "UniverseMismatch"


class UnsolvedMeta(KernelError):
    code = "UnsolvedMeta"


class TypeMismatch(KernelError):
    code = "TypeMismatch"


class CannotInfer(KernelError):
    code = "CannotInfer"


class FuelExhausted(KernelError):
    code = "FuelExhausted"


class DuplicateName(KernelError):
    code = "DuplicateName"


class RewriteHeadIsDefinition(KernelError):
    code = "RewriteHeadIsDefinition"


class NonlinearPattern(KernelError):
    code = "NonlinearPattern"


class RewriteTypeMismatch(KernelError):
    code = "RewriteTypeMismatch"


class InvalidRewrite(KernelError):
    code = "InvalidRewrite"


ERROR_CODES: tuple[str, ...] = (
    "ParseError",
    "IllegalCharacter",
    "UnboundVariable",
    "UnknownConstant",
    "NotAFunction",
    "NotAPair",
    "UniverseMismatch",
    "UnsolvedMeta",
    "TypeMismatch",
    "CannotInfer",
    "FuelExhausted",
    "DuplicateName",
    "RewriteHeadIsDefinition",
    "NonlinearPattern",
    "RewriteTypeMismatch",
    "InvalidRewrite",
)
