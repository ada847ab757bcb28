"""Forbidden-state predicates over (location, valuation).

A predicate is an ordinary expression in which ``loc() == X`` (or
``location == X``) may appear as an atom.  Such atoms are rewritten to a
marker variable before parsing so the usual expression machinery applies.
"""

from __future__ import annotations

import re

from .diagnostics import DiagnosticError, error
from .expr import normalize, to_text, variables
from .frontend.parser import parse_expr

LOC_PREFIX = "__loc__"
_LOC_RE = re.compile(r"\bloc\s*\(\s*\w*\s*\)\s*==\s*([A-Za-z_]\w*)|\blocation\s*==\s*([A-Za-z_]\w*)")
_MARK_RE = re.compile(LOC_PREFIX + r"(\w+)")


def parse_predicate(text: str):
    def mark(m):
        return LOC_PREFIX + (m.group(1) or m.group(2))
    return normalize(parse_expr(_LOC_RE.sub(mark, text), "<forbidden>"))


def location_atoms(pred) -> set:
    return {v[len(LOC_PREFIX):] for v in variables(pred) if v.startswith(LOC_PREFIX)}


def check_predicate(pred, ha) -> None:
    """Reject variables the automaton does not declare.

    ``Fault`` is always an acceptable location name: an automaton without a
    Fault location simply never satisfies that atom.
    """
    problems = []
    known = set(ha.variables)
    for v in sorted(variables(pred)):
        if v.startswith(LOC_PREFIX):
            name = v[len(LOC_PREFIX):]
            if name != "Fault" and ha.location_named(name) is None:
                problems.append(error(f"unknown location in predicate: {name}"))
        elif v not in known:
            problems.append(error(f"unknown variable in predicate: {v}"))
    if problems:
        raise DiagnosticError(problems)


def to_spaceex(pred, system: str = "sys") -> str:
    text = to_text(pred, and_op="&", or_op="|")
    return _MARK_RE.sub(lambda m: f"loc({system})=={m.group(1)}", text)
