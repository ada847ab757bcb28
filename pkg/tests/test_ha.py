from fractions import Fraction

import pytest
from hypothesis import given, settings

from hrbc import ha as ham
from hrbc.diagnostics import DiagnosticError
from hrbc.expr import TRUE, Binary, Num, Var

from .conftest import full_ha
from .strategies import automata

T = Var("t")


def num(v):
    return Num(Fraction(v))


def heater_by_hand():
    on = ham.Location(0, "on", {"t": Binary("-", num(4), Binary("*", num("0.1"), T))},
                      Binary("<=", T, num(22)))
    off = ham.Location(1, "off", {"t": Binary("-", num(0), Binary("*", num("0.1"), T))},
                       Binary(">=", T, num(18)))
    edges = [ham.Transition(0, 1, Binary("==", T, num(22))),
             ham.Transition(1, 0, Binary("==", T, num(18)))]
    return ham.build([on, off], edges, ("t",), {1: Binary("==", T, num(20))})


def test_heater_by_hand():
    ha = heater_by_hand()
    assert ham.validate(ha) == []
    assert ham.stats(ha) == (2, 2, 0)
    assert ha.initial_location == 1
    assert ha.initial_valuation() == {"t": Fraction(20)}
    assert ha.outgoing(0) == [0] and ha.outgoing(1) == [1]
    assert ha.location_named("on").id == 0 and ha.location_named("nowhere") is None


def test_minimal_automaton():
    ha = ham.build([ham.Location(0, "A", {"x": num(0)})], [], ("x",), {0: TRUE})
    assert ham.validate(ha) == [] and ham.stats(ha) == (1, 0, 0)


@pytest.mark.parametrize("locations, edges, init, message", [
    ([ham.Location(0, "A")], [ham.Transition(0, 3)], {0: TRUE}, "endpoint 3 is not a location"),
    ([ham.Location(0, "A"), ham.Location(0, "B")], [], {0: TRUE}, "duplicate location id 0"),
    ([ham.Location(0, "A")], [], {}, "exactly one initial location"),
    ([ham.Location(0, "A")], [], {5: TRUE}, "initial location 5 is not a location"),
])
def test_build_errors(locations, edges, init, message):
    with pytest.raises(DiagnosticError, match=message):
        ham.build(locations, edges, (), init)


def test_validate_reports_problems():
    x, u = Var("x"), Var("u")
    locs = [ham.Location(0, "A", {}, Binary("<=", x, num(1))),
            ham.Location(1, "U1", urgent=True)]
    edges = [ham.Transition(0, 1, Binary(">", u, num(0)), (("x", num(1)), ("x", num(2))))]
    ha = ham.build(locs, edges, ("x",), {0: Binary("==", x, num(3))}, 0)
    assert ham.validate(ha) == [
        "missing flow: x (location A)",
        "unknown variable: u (transition 0)",
        "duplicate assignment: x (transition 0)",
    ]
    ha = ham.build(locs[:1], [], ("x",), {0: Binary(">", x, num(3))}, 0)
    assert "unsatisfiable init condition" in ham.validate(ha)


def test_urgent_cycle_detection():
    locs = [ham.Location(i, f"U{i}", urgent=True) for i in range(3)] + [ham.Location(3, "A")]
    edges = [ham.Transition(0, 1), ham.Transition(1, 2), ham.Transition(2, 3),
             ham.Transition(3, 0)]
    ha = ham.build(locs, edges, (), {0: TRUE}, 0)
    assert ham.find_urgent_cycle(ha) is None
    ha = ham.build(locs, edges + [ham.Transition(2, 1)], (), {0: TRUE}, 0)
    cycle = ham.find_urgent_cycle(ha)
    assert ham.describe_cycle(ha, cycle) == "U1 -> U2 -> U1"


@pytest.mark.parametrize("name", ["heater", "delay_tank", "fault_queue", "fault_timer",
                                  "fault_can", "pingpong", "ring"])
def test_derived_automata_are_valid(name):
    ha = full_ha(name)
    assert ham.validate(ha) == []
    assert ha.initial_valuation() == {v: 0 for v in ha.variables}


@settings(max_examples=100, deadline=None)
@given(automata())
def test_stats_consistent(ha):
    n, m, k = ham.stats(ha)
    assert n == len(ha.locations) and m == len(ha.transitions)
    assert k == sum(loc.urgent for loc in ha.locations.values())
    assert sum(len(ha.outgoing(i)) for i in ha.locations) == m
