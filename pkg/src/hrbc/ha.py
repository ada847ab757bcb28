"""Hybrid automata with an explicit urgency flag per location."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .diagnostics import DiagnosticError, error
from .expr import TRUE, Binary, Expr, Num, Var, conj, conjuncts, evaluate, variables

FAULT_NAME = "Fault"


@dataclass(frozen=True)
class Location:
    id: int
    name: str
    flows: Mapping[str, Expr] = field(default_factory=dict)
    invariant: Expr = TRUE
    urgent: bool = False


@dataclass(frozen=True)
class Transition:
    source: int
    target: int
    guard: Expr = TRUE
    assignments: tuple = ()  # ((var, expr), ...), applied simultaneously
    label: Optional[str] = None
    cause: Optional[str] = None  # why a Fault edge exists


@dataclass
class HybridAutomaton:
    locations: dict  # id -> Location, iterated in id order
    variables: tuple
    transitions: list
    init: dict  # location id -> boolean Expr
    initial_location: int
    labels: frozenset = frozenset()

    def __post_init__(self):
        self._out = None

    def __eq__(self, other):
        if not isinstance(other, HybridAutomaton):
            return NotImplemented
        return (self.locations == other.locations and self.variables == other.variables
                and self.transitions == other.transitions and self.init == other.init
                and self.initial_location == other.initial_location
                and self.labels == other.labels)

    def location(self, ident: int) -> Location:
        return self.locations[ident]

    def location_named(self, name: str) -> Optional[Location]:
        for loc in self.locations.values():
            if loc.name == name:
                return loc
        return None

    def outgoing(self, ident: int) -> list:
        """Indices of transitions leaving location ``ident``, in list order."""
        if self._out is None:
            out = {i: [] for i in self.locations}
            for k, t in enumerate(self.transitions):
                out[t.source].append(k)
            self._out = out
        return self._out[ident]

    def initial_valuation(self) -> dict:
        """Point valuation picked from the init condition: equalities ``v == c``
        fix ``v``; everything else starts at zero."""
        val = {v: Fraction(0) for v in self.variables}
        for atom in conjuncts(self.init.get(self.initial_location, TRUE)):
            if (isinstance(atom, Binary) and atom.op == "==" and isinstance(atom.left, Var)
                    and isinstance(atom.right, Num)):
                val[atom.left.name] = atom.right.value
        return val


def zero_init(variables_) -> Expr:
    return conj(Binary("==", Var(v), Num(Fraction(0))) for v in variables_)


def build(locations, transitions, variables_, init, initial_location: Optional[int] = None,
          labels=frozenset()) -> HybridAutomaton:
    """Assemble an automaton, rejecting duplicate ids and dangling edges."""
    locs = {}
    diags = []
    for loc in locations:
        if loc.id in locs:
            diags.append(error(f"duplicate location id {loc.id}"))
        locs[loc.id] = loc
    for t in transitions:
        for end in (t.source, t.target):
            if end not in locs:
                diags.append(error(f"transition endpoint {end} is not a location"))
    init = dict(init)
    if initial_location is None:
        if len(init) != 1:
            diags.append(error("exactly one initial location is required"))
        else:
            initial_location = next(iter(init))
    if initial_location is not None and initial_location not in locs:
        diags.append(error(f"initial location {initial_location} is not a location"))
    if diags:
        raise DiagnosticError(diags)
    init.setdefault(initial_location, TRUE)
    return HybridAutomaton(dict(sorted(locs.items())), tuple(variables_), list(transitions),
                           init, initial_location, frozenset(labels))


def validate(ha: HybridAutomaton) -> list:
    """Well-formedness problems as plain messages; empty when the HA is sound."""
    problems = []
    known = set(ha.variables)

    def refs(e, where):
        for name in sorted(variables(e) - known):
            problems.append(f"unknown variable: {name} ({where})")

    for loc in ha.locations.values():
        where = f"location {loc.name}"
        for v in loc.flows:
            if v not in known:
                problems.append(f"unknown variable: {v} ({where} flow)")
        for v, e in loc.flows.items():
            refs(e, where)
        refs(loc.invariant, where)
        if not loc.urgent:
            for v in ha.variables:
                if v not in loc.flows:
                    problems.append(f"missing flow: {v} ({where})")
    for k, t in enumerate(ha.transitions):
        where = f"transition {k}"
        if t.source not in ha.locations or t.target not in ha.locations:
            problems.append(f"dangling transition: {k}")
        refs(t.guard, where)
        seen = set()
        for v, e in t.assignments:
            if v not in known:
                problems.append(f"unknown variable: {v} ({where} assignment)")
            if v in seen:
                problems.append(f"duplicate assignment: {v} ({where})")
            seen.add(v)
            refs(e, where)
    if ha.initial_location not in ha.locations:
        problems.append(f"missing initial location: {ha.initial_location}")
    for lid, e in ha.init.items():
        refs(e, "init")
        if lid not in ha.locations:
            problems.append(f"init refers to missing location: {lid}")
    if set(ha.init) - {ha.initial_location}:
        problems.append("init conditions on more than one location")
    cond = ha.init.get(ha.initial_location, TRUE)
    if not variables(cond) - known:
        try:
            ok = evaluate(cond, ha.initial_valuation())
        except (KeyError, ZeroDivisionError):
            ok = False
        if not ok:
            problems.append("unsatisfiable init condition")
    return problems


def stats(ha: HybridAutomaton) -> tuple:
    """(locations, transitions, urgent locations)."""
    urgent = sum(1 for loc in ha.locations.values() if loc.urgent)
    return len(ha.locations), len(ha.transitions), urgent


def find_urgent_cycle(ha: HybridAutomaton) -> Optional[list]:
    """A cycle through urgent locations only, as a list of ids, or None."""
    succ = {i: [] for i, loc in ha.locations.items() if loc.urgent}
    for t in ha.transitions:
        if t.source in succ and t.target in succ:
            succ[t.source].append(t.target)
    color = dict.fromkeys(succ, 0)
    for root in succ:
        if color[root]:
            continue
        path = [root]
        iters = [iter(succ[root])]
        color[root] = 1
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = 2
                iters.pop()
            elif color[nxt] == 1:
                return path[path.index(nxt):] + [nxt]
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                iters.append(iter(succ[nxt]))
    return None


def describe_cycle(ha: HybridAutomaton, cycle: list) -> str:
    return " -> ".join(ha.locations[i].name for i in cycle)
