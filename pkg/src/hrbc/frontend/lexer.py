"""Tokenizer for ``.hrebeca`` sources."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..diagnostics import DiagnosticError, Span, error

KEYWORDS = frozenset({
    "softwareclass", "physicalclass", "knownrebecs", "statevars", "msgsrv",
    "mode", "inv", "guard", "delay", "setmode", "main", "CAN", "priorities",
    "delays", "self", "if", "else", "const", "true", "false",
    "int", "real", "float",
})

_PUNCT = [
    ("->", "Arrow"), ("&&", "AndAnd"), ("||", "OrOr"), ("==", "EqEq"),
    ("!=", "Ne"), ("<=", "Le"), (">=", "Ge"),
    ("{", "LBrace"), ("}", "RBrace"), ("(", "LParen"), (")", "RParen"),
    (";", "Semi"), (",", "Comma"), (".", "Dot"), (":", "Colon"),
    ("'", "Prime"), ("=", "Eq"), ("<", "Lt"), (">", "Gt"), ("+", "Plus"),
    ("-", "Minus"), ("*", "Star"), ("/", "Slash"), ("!", "Bang"), ("@", "At"),
]
PUNCT_TEXT = {kind: text for text, kind in _PUNCT}

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<line>//[^\n]*)"
    r"|(?P<block>/\*.*?\*/)"
    r"|(?P<num>\d+(?:\.\d+)?|\.\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>" + "|".join(re.escape(t) for t, _ in _PUNCT) + ")",
    re.S,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span
    value: Optional[Fraction] = None

    def __repr__(self):
        if self.kind in ("Ident", "Num"):
            return f"{self.kind}({self.text})"
        return self.kind


def tokenize(source: str, filename: str = "<input>") -> list:
    """Split source text into tokens carrying line/column spans.

    Whitespace and comments are dropped.  An unexpected character raises
    ``DiagnosticError`` pointing at it.
    """
    tokens = []
    pos = 0
    line, col = 1, 1
    kinds = {t: k for t, k in _PUNCT}
    while pos < len(source):
        if source.startswith("/*", pos) and source.find("*/", pos + 2) < 0:
            raise DiagnosticError([error("unterminated block comment", Span(filename, line, col))])
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            msg = f"illegal character {source[pos]!r}"
            raise DiagnosticError([error(msg, Span(filename, line, col))])
        text = m.group(0)
        span = Span(filename, line, col)
        group = m.lastgroup
        if group == "num":
            tokens.append(Token("Num", text, span, Fraction(text)))
        elif group == "ident":
            kind = f"KW_{text}" if text in KEYWORDS else "Ident"
            tokens.append(Token(kind, text, span))
        elif group == "punct":
            tokens.append(Token(kinds[text], text, span))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    return tokens
