"""Source spans and diagnostics shared by every pipeline stage."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: Optional[Span] = None

    def format(self, color: bool = False) -> str:
        where = f"{self.span}: " if self.span is not None else ""
        sev = self.severity
        if color:
            code = "31" if sev == "error" else "33"
            sev = f"\x1b[1;{code}m{sev}\x1b[0m"
        return f"{where}{sev}: {self.message}"

    def __str__(self):
        return self.format()


def error(message: str, span: Optional[Span] = None) -> Diagnostic:
    return Diagnostic("error", message, span)


def warning(message: str, span: Optional[Span] = None) -> Diagnostic:
    return Diagnostic("warning", message, span)


class DiagnosticError(Exception):
    """Raised by a stage that produced one or more error diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


def use_color(stream=None) -> bool:
    if os.environ.get("HRBC_COLOR", "1") == "0":
        return False
    stream = stream or sys.stderr
    return hasattr(stream, "isatty") and stream.isatty()


def report(diagnostics, stream=None) -> None:
    stream = stream or sys.stderr
    color = use_color(stream)
    for d in diagnostics:
        print(d.format(color), file=stream)
