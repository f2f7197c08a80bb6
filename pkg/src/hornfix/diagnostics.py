"""Source spans and diagnostics shared by the parser and the validators."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Code(str, Enum):
    SYNTAX = "SyntaxError"
    UNEXPECTED_EOF = "UnexpectedEOF"
    UNKNOWN_SYMBOL = "UnknownSymbol"
    ARITY_MISMATCH = "ArityMismatch"
    NEGATED_INTENTIONAL = "NegatedIntentional"
    UNIVERSAL_OVER_EXTENSIONAL = "UniversalOverExtensional"
    MALFORMED_UNIVERSAL = "MalformedUniversal"
    NON_EXISTENTIAL_PREFIX = "NonExistentialPrefix"
    NEGATED_SO_VARIABLE = "NegatedSOVariable"
    HEAD_NOT_SO_VARIABLE = "HeadNotSOVariable"
    NEGATIVE_FIXPOINT_VARIABLE = "NegativeFixpointVariable"
    NOT_DNF = "NotDNF"
    FIXPOINT_ARITY_MISMATCH = "FixpointArityMismatch"
    DUPLICATE_NAME = "DuplicateName"
    EMPTY_DOMAIN = "EmptyDomain"
    OUT_OF_DOMAIN = "OutOfDomain"


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"span start {self.start} after end {self.end}")

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    code: Code
    message: str
    span: SourceSpan | None = None

    def __str__(self):
        where = f"{self.span}: " if self.span is not None else ""
        return f"{where}{self.code.value}: {self.message}"


class DiagnosticError(Exception):
    """Raised when a parse or validation produces one or more diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))

    @property
    def codes(self):
        return [d.code for d in self.diagnostics]
