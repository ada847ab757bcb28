from fractions import Fraction

import pytest
from hypothesis import given, settings

from hrbc import ha as ham
from hrbc.diagnostics import DiagnosticError
from hrbc.expr import FALSE, TRUE, Binary, Num, Var, conjuncts, normalize, subst, to_text
from hrbc.reducer import PSEUDO_INITIAL, aggregate, prune_unreachable

from .conftest import bbw_pair, full_ha
from .strategies import automata


def effect_key(src, atoms, assigns, target):
    return (src, frozenset(atoms), frozenset(assigns.items()), target)


def brute_force_edges(ha) -> set:
    """Every path between non-urgent endpoints through urgent locations,
    composed step by step and deduplicated by its effect."""
    out = set()
    starts = [i for i, loc in ha.locations.items() if not loc.urgent]
    if ha.locations[ha.initial_location].urgent:
        starts.append(None)

    def walk(src, node, atoms, env):
        for k in ha.outgoing(node):
            t = ha.transitions[k]
            guard = normalize(subst(t.guard, env))
            if guard == FALSE:
                continue
            step_atoms = atoms | {a for a in conjuncts(guard) if a != TRUE}
            new_env = dict(env)
            for v, e in t.assignments:
                new_env[v] = normalize(subst(e, env))
            if ha.locations[t.target].urgent:
                walk(src, t.target, step_atoms, new_env)
            else:
                assigns = {v: e for v, e in new_env.items() if e != Var(v)}
                out.add(effect_key(src, step_atoms, assigns, t.target))

    identity = {v: Var(v) for v in ha.variables}
    for s in starts:
        walk(s, ha.initial_location if s is None else s, frozenset(), identity)
    return out


def reduced_edges(ha, reduced) -> set:
    def src(i):
        return None if reduced.locations[i].name == PSEUDO_INITIAL else i
    return {effect_key(src(t.source), (a for a in conjuncts(t.guard) if a != TRUE),
                       {v: normalize(e) for v, e in t.assignments}, t.target)
            for t in reduced.transitions}


def reachable(ha) -> set:
    return {i for i in ha.locations} if not ha.transitions else _bfs(ha)


def _bfs(ha):
    seen, stack = {ha.initial_location}, [ha.initial_location]
    while stack:
        for k in ha.outgoing(stack.pop()):
            t = ha.transitions[k].target
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def test_heater_aggregation(heater, heater_reduced):
    names = sorted(loc.name for loc in heater_reduced.locations.values())
    assert names == [PSEUDO_INITIAL, "L3_h_Off", "L5_h_On"]
    assert not any(loc.urgent for loc in heater_reduced.locations.values())
    init = heater_reduced.locations[heater_reduced.initial_location]
    assert init.name == PSEUDO_INITIAL
    assert all(e == Num(Fraction(0)) for e in init.flows.values())
    guards = sorted(to_text(t.guard) for t in heater_reduced.transitions)
    assert guards == ["h_t == 18", "h_t == 22", "true"]
    for name in ("L3_h_Off", "L5_h_On"):
        assert heater_reduced.location_named(name) == heater.location_named(name)


def test_composition_by_substitution():
    """x := x + 1 followed by the guard x == 2 composes to x + 1 == 2."""
    locs = [ham.Location(0, "A", {"x": Num(Fraction(1))}), ham.Location(1, "U1", urgent=True),
            ham.Location(2, "B", {"x": Num(Fraction(0))})]
    x = Var("x")
    edges = [
        ham.Transition(0, 1, Binary(">=", x, Num(Fraction(1))),
                       (("x", Binary("+", x, Num(Fraction(1)))),)),
        ham.Transition(1, 2, Binary("==", x, Num(Fraction(2))),
                       (("x", Binary("*", x, Num(Fraction(3)))),)),
        ham.Transition(1, 2, Binary("==", Num(Fraction(1)), Num(Fraction(2)))),
    ]
    ha = ham.build(locs, edges, ("x",), {0: ham.zero_init(("x",))}, 0)
    (t,) = aggregate(ha).transitions
    assert to_text(t.guard) == "x + 1 == 2 && x >= 1"
    assert [(v, to_text(e)) for v, e in t.assignments] == [("x", "(x + 1)*3")]


def test_urgent_cycle_is_reported():
    locs = [ham.Location(0, "A"), ham.Location(1, "U1", urgent=True),
            ham.Location(2, "U2", urgent=True)]
    edges = [ham.Transition(0, 1), ham.Transition(1, 2), ham.Transition(2, 1)]
    ha = ham.build(locs, edges, (), {0: TRUE}, 0)
    with pytest.raises(DiagnosticError, match="instantaneous divergence: U1 -> U2 -> U1"):
        aggregate(ha)


def test_prune_removes_isolated_location(heater):
    assert prune_unreachable(heater) == heater
    extra = ham.build(list(heater.locations.values()) + [ham.Location(99, "Island")],
                      heater.transitions, heater.variables, heater.init, heater.initial_location)
    assert prune_unreachable(extra) == heater


def test_bbw_reduction():
    full, reduced = bbw_pair()
    n, _, _ = ham.stats(reduced)
    assert ham.stats(full)[0] >= 5000
    assert n <= 50 and ham.stats(reduced)[2] == 0
    assert prune_unreachable(reduced) == reduced
    assert aggregate(reduced) == reduced
    for loc in reduced.locations.values():
        if loc.name != PSEUDO_INITIAL:
            assert loc == full.locations[loc.id]


@pytest.mark.parametrize("name", ["heater", "delay_tank", "fault_can", "fault_timer"])
def test_edges_match_path_enumeration(name):
    ha = full_ha(name)
    assert reduced_edges(ha, aggregate(ha)) == brute_force_edges(ha)


def test_unsatisfiable_paths_are_dropped():
    locs = [ham.Location(0, "A"), ham.Location(1, "U1", urgent=True), ham.Location(2, "B")]
    x = Var("x")
    edges = [ham.Transition(0, 1, TRUE, (("x", Num(Fraction(5))),)),
             ham.Transition(1, 2, Binary("<", x, Num(Fraction(3))))]
    ha = ham.build(locs, edges, ("x",), {0: TRUE}, 0)
    reduced = aggregate(ha)
    assert reduced.transitions == [] and list(reduced.locations) == [0]


@settings(max_examples=150, deadline=None)
@given(automata())
def test_random_automata(ha):
    reduced = aggregate(ha)
    assert not any(loc.urgent for loc in reduced.locations.values())
    assert aggregate(reduced) == reduced
    assert ham.validate(reduced) == []
    assert reachable(reduced) == set(reduced.locations)
    kept = {k for k in reduced.locations if reduced.locations[k].name != PSEUDO_INITIAL}
    assert kept <= {i for i, loc in ha.locations.items() if not loc.urgent}
    expected = {e for e in brute_force_edges(ha) if e[0] is None or e[0] in reduced.locations}
    assert reduced_edges(ha, reduced) == expected
