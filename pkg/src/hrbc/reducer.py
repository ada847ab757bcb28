"""Aggregation of urgent locations.

Every instantaneous path ``L -> u1 -> ... -> uk -> L'`` between non-urgent
locations is collapsed into one composed transition.  Guards met along the
path are rewritten through the assignments that precede them, and the
assignments are flattened into one simultaneous update per variable.

Paths are not enumerated one by one.  Each urgent location memoizes the set
of distinct effects it can produce, so interleavings of independent actions
collapse into a single effect as soon as they agree.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from . import ha as ham
from .diagnostics import DiagnosticError, error
from .expr import FALSE, TRUE, Bool, Num, Var, conj, conjuncts, normalize, subst, to_text

PSEUDO_INITIAL = "Init"


def _atoms(guard) -> frozenset:
    """Conjuncts of a guard; ``None`` when it folds to false."""
    guard = normalize(guard)
    if guard == FALSE:
        return None
    return frozenset(a for a in conjuncts(guard) if a != TRUE)


def _assigns(pairs) -> dict:
    return {v: normalize(e) for v, e in pairs if normalize(e) != Var(v)}


def _compose(atoms, assigns, later_atoms, later_assigns):
    """Effect of running (atoms, assigns) then (later_atoms, later_assigns)."""
    out_atoms = set(atoms)
    for a in later_atoms:
        a = subst(a, assigns)
        if isinstance(a, Bool):
            if not a.value:
                return None
            continue
        out_atoms.add(a)
    out = {v: e for v, e in assigns.items() if v not in later_assigns}
    for v, e in later_assigns.items():
        e = subst(e, assigns)
        if e != Var(v):
            out[v] = e
    return frozenset(out_atoms), out


def _freeze(assigns: dict) -> tuple:
    return tuple(sorted(assigns.items()))


def _topological_urgent(ha: ham.HybridAutomaton) -> list:
    """Urgent location ids, every location after all urgent successors."""
    cycle = ham.find_urgent_cycle(ha)
    if cycle is not None:
        raise DiagnosticError([error(f"instantaneous divergence: {ham.describe_cycle(ha, cycle)}")])
    urgent = {i for i, loc in ha.locations.items() if loc.urgent}
    done, order = set(), []
    for root in sorted(urgent):
        if root in done:
            continue
        stack = [(root, iter(ha.outgoing(root)))]
        done.add(root)
        while stack:
            node, it = stack[-1]
            for k in it:
                tgt = ha.transitions[k].target
                if tgt in urgent and tgt not in done:
                    done.add(tgt)
                    stack.append((tgt, iter(ha.outgoing(tgt))))
                    break
            else:
                stack.pop()
                order.append(node)
    return order


def _effects(ha: ham.HybridAutomaton) -> dict:
    """Urgent id -> {(atoms, frozen assigns, target): (path key, assigns)}."""
    memo = {}
    for u in _topological_urgent(ha):
        memo[u] = _leaving(ha, u, memo)
    return memo


def _leaving(ha, node, memo) -> dict:
    out = {}
    for k in ha.outgoing(node):
        t = ha.transitions[k]
        atoms = _atoms(t.guard)
        if atoms is None:
            continue
        assigns = _assigns(t.assignments)
        if not ha.locations[t.target].urgent:
            candidates = [((k,), atoms, assigns, t.target)]
        else:
            candidates = []
            for (l_atoms, _, target), (l_key, l_assigns) in memo[t.target].items():
                composed = _compose(atoms, assigns, l_atoms, l_assigns)
                if composed is not None:
                    candidates.append(((k,) + l_key, composed[0], composed[1], target))
        for key, c_atoms, c_assigns, target in candidates:
            ident = (c_atoms, _freeze(c_assigns), target)
            best = out.get(ident)
            if best is None or key < best[0]:
                out[ident] = (key, c_assigns)
    return out


def aggregate(ha: ham.HybridAutomaton) -> ham.HybridAutomaton:
    """Remove all urgent locations, composing the paths through them."""
    memo = _effects(ha)
    start = ha.initial_location
    locations = {i: loc for i, loc in ha.locations.items() if not loc.urgent}
    init = dict(ha.init)
    sources = sorted(locations)
    if ha.locations[start].urgent:
        pseudo = max(ha.locations) + 1
        locations[pseudo] = ham.Location(pseudo, PSEUDO_INITIAL,
                                         {v: Num(Fraction(0)) for v in ha.variables})
        init = {pseudo: ha.init.get(start, TRUE)}
        sources.append(pseudo)
    edges = []
    for src in sources:
        if src in ha.locations and not ha.locations[src].urgent:
            effects = _leaving(ha, src, memo)
        else:
            effects = memo[start]
        for (atoms, _, target), (key, assigns) in effects.items():
            guard = conj(sorted(atoms, key=to_text))
            pairs = tuple(sorted(assigns.items()))
            cause = _cause(ha, key)
            edges.append(((src, key), ham.Transition(src, target, guard, pairs, cause=cause)))
    edges.sort(key=lambda item: item[0])
    new_start = start if not ha.locations[start].urgent else max(ha.locations) + 1
    reduced = ham.build(locations.values(), [t for _, t in edges], ha.variables, init,
                        new_start, ha.labels)
    return prune_unreachable(reduced)


def _cause(ha, key):
    last = ha.transitions[key[-1]]
    return last.cause


def prune_unreachable(ha: ham.HybridAutomaton) -> ham.HybridAutomaton:
    """Drop locations (and their edges) that the initial location cannot reach."""
    seen = {ha.initial_location}
    queue = deque([ha.initial_location])
    while queue:
        node = queue.popleft()
        for k in ha.outgoing(node):
            tgt = ha.transitions[k].target
            if tgt not in seen:
                seen.add(tgt)
                queue.append(tgt)
    if len(seen) == len(ha.locations):
        return ha
    locations = [loc for i, loc in ha.locations.items() if i in seen]
    edges = [t for t in ha.transitions if t.source in seen]
    init = {i: e for i, e in ha.init.items() if i in seen}
    return ham.build(locations, edges, ha.variables, init, ha.initial_location, ha.labels)
