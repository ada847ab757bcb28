"""Canonical JSON interchange format for hybrid automata.

Expressions are stored as source text and parsed back on load, so a file
can be read and edited by hand.
"""

from __future__ import annotations

import json

from ..expr import normalize, to_text
from ..frontend.parser import parse_expr
from ..ha import HybridAutomaton, Location, Transition, build

FORMAT = "hrbc-ha/1"


def emit_json(ha: HybridAutomaton) -> str:
    doc = {
        "format": FORMAT,
        "variables": list(ha.variables),
        "labels": sorted(ha.labels),
        "initial_location": ha.initial_location,
        "init": {str(i): to_text(e) for i, e in sorted(ha.init.items())},
        "locations": [
            {
                "id": loc.id,
                "name": loc.name,
                "urgent": loc.urgent,
                "flows": {v: to_text(e) for v, e in loc.flows.items()},
                "invariant": to_text(loc.invariant),
            }
            for _, loc in sorted(ha.locations.items())
        ],
        "transitions": [
            {
                "source": t.source,
                "target": t.target,
                "guard": to_text(t.guard),
                "assignments": [[v, to_text(e)] for v, e in t.assignments],
                "label": t.label,
                "cause": t.cause,
            }
            for t in ha.transitions
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _expr(text: str):
    return normalize(parse_expr(text, "<json>"))


def load_json(text: str) -> HybridAutomaton:
    doc = json.loads(text)
    if doc.get("format", FORMAT) != FORMAT:
        raise ValueError(f"unsupported automaton format {doc['format']!r}")
    locations = [
        Location(d["id"], d["name"], {v: _expr(e) for v, e in d["flows"].items()},
                 _expr(d["invariant"]), bool(d["urgent"]))
        for d in doc["locations"]
    ]
    transitions = [
        Transition(d["source"], d["target"], _expr(d["guard"]),
                   tuple((v, _expr(e)) for v, e in d["assignments"]), d.get("label"), d.get("cause"))
        for d in doc["transitions"]
    ]
    init = {int(k): _expr(v) for k, v in doc["init"].items()}
    return build(locations, transitions, doc["variables"], init, doc["initial_location"],
                 frozenset(doc.get("labels", ())))


def read_json(path) -> HybridAutomaton:
    with open(path, encoding="utf-8") as f:
        return load_json(f.read())
