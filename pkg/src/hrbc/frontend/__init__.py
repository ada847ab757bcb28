"""Lexer, parser, checker and pretty printer for ``.hrebeca`` sources."""

from .ast import Model, ModelAST
from .checker import CheckedModel, RebecInfo, check
from .lexer import Token, tokenize
from .parser import parse, parse_expr, parse_source
from .printer import pretty_print


def load_model(path) -> CheckedModel:
    """Read, parse and check a model file."""
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return check(parse_source(text, str(path)))


__all__ = [
    "Model", "ModelAST", "CheckedModel", "RebecInfo", "Token",
    "tokenize", "parse", "parse_source", "parse_expr", "check",
    "pretty_print", "load_model",
]
