"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line; the lines are printed together at the
end of the pytest run (see ``pytest_terminal_summary`` in conftest.py).
"""

import contextlib
import time
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrbc import ha as ham
from hrbc.backend import emit_json, emit_spaceex
from hrbc.backend.spaceex import NAMESPACE
from hrbc.cli import main
from hrbc.expr import normalize
from hrbc.frontend import load_model
from hrbc.frontend.parser import parse_expr
from hrbc.reducer import PSEUDO_INITIAL, aggregate
from hrbc.simulator import check_forbidden, equivalence_check, simulate
from hrbc.translator import ExplorationLimits, Translator, explore

from . import oracle
from .conftest import (BBW_LIMITS, MODELS, bbw_pair, full_ha, model_path, reaction_pair,
                       slip_pair)
from .test_backend import urgency_audit
from .test_translator import deliveries, fault_reachable

RESULTS = {}

TITLES = {
    1: "heater regression",
    2: "BBW pipeline size and reduction",
    3: "BBW safety properties by simulation",
    4: "Fault triggers",
    5: "CAN determinism",
    6: "oracle equivalence",
    7: "aggregation equivalence",
    8: "emission determinism",
    9: "urgency encoding audit",
}


@contextlib.contextmanager
def criterion(n: int, detail: str = ""):
    try:
        yield
    except BaseException as exc:
        RESULTS[n] = f"FAIL criterion {n}: {TITLES[n]} ({type(exc).__name__}: {exc})".splitlines()[0]
        raise
    RESULTS[n] = f"PASS criterion {n}: {TITLES[n]}" + (f" ({detail})" if detail else "")


def expr(text):
    return normalize(parse_expr(text, "<expected>"))


def test_criterion_1_heater():
    with criterion(1):
        start = time.perf_counter()
        reduced = aggregate(explore(load_model(model_path("heater"))))
        elapsed = time.perf_counter() - start
        behavior = [loc for loc in reduced.locations.values()
                    if loc.name not in (PSEUDO_INITIAL, ham.FAULT_NAME)]
        assert len(behavior) == 2
        assert reduced.locations[reduced.initial_location].name == PSEUDO_INITIAL
        by_flow = {loc.flows["h_t"]: loc for loc in behavior}
        on = by_flow[expr("4 - 0.1*h_t")]
        off = by_flow[expr("-0.1*h_t")]
        assert on.invariant == expr("h_t <= 22") and off.invariant == expr("h_t >= 18")
        guards = {(t.source, t.target): t.guard for t in reduced.transitions}
        assert guards[(on.id, off.id)] == expr("h_t == 22")
        assert guards[(off.id, on.id)] == expr("h_t == 18")
        assert elapsed < 1.0
    RESULTS[1] += f" ({elapsed * 1000:.0f} ms)"


def test_criterion_2_bbw_pipeline():
    with criterion(2):
        start = time.perf_counter()
        full = explore(load_model(model_path("bbw")), ExplorationLimits(**BBW_LIMITS))
        reduced = aggregate(full)
        elapsed = time.perf_counter() - start
        n_full, n_reduced = ham.stats(full)[0], ham.stats(reduced)[0]
        assert n_full >= 5000
        assert n_reduced <= 50 and ham.stats(reduced)[2] == 0
        ratio = 1 - n_reduced / n_full
        assert ratio >= 0.99
        assert elapsed <= 120
    RESULTS[2] += f" ({n_full} -> {n_reduced} locations, {100 * ratio:.2f}%, {elapsed:.1f}s)"


# (model, property) pairs: the plain model for design faults, one instrumented
# variant per timing property
PROPERTIES = [
    ("bbw", "a", "loc() == Fault"),
    ("bbw_reaction", "a", "loc() == Fault"),
    ("bbw_slip", "a", "loc() == Fault"),
    ("bbw_reaction", "b", "monitor_time > 0.2"),
    ("bbw_slip", "c", "wctlr_slprate > 0.2 && wheel_torque > 0 && monitor_time > 0"),
]


def test_criterion_3_safety_by_simulation():
    with criterion(3):
        automata = {"bbw": bbw_pair()[1], "bbw_reaction": reaction_pair()[1],
                    "bbw_slip": slip_pair()[1]}
        slowest, peak, slipping = 0.0, 0.0, 0
        for name, ha in automata.items():
            for seed in range(10):
                start = time.perf_counter()
                trace = simulate(ha, 2.0, 1e-3, policy="random", seed=seed)
                slowest = max(slowest, time.perf_counter() - start)
                assert trace.status == "ok", trace.message
                assert len(trace.samples) == 2001
                for model, key, pred in PROPERTIES:
                    if model == name:
                        verdict = check_forbidden(trace, pred, ha)
                        assert verdict.safe, f"property {key} on {name} seed {seed}: {verdict}"
                if name == "bbw_reaction":
                    k = trace.variables.index("monitor_time")
                    peak = max(peak, max(s[2][k] for s in trace.samples))
                if name == "bbw_slip":
                    # the anti-lock branch must be exercised for (c) to mean anything
                    slipping += not check_forbidden(trace, "wctlr_slprate > 0.2").safe
        assert slowest <= 10
        assert slipping > 0
    RESULTS[3] += (f" (10 seeds per model, max reaction time {peak:.3f}s, slip > 0.2 seen in "
                   f"{slipping}/10 runs, slowest run {slowest:.2f}s)")


def test_criterion_4_fault_triggers():
    with criterion(4):
        found = {}
        for name, cause in [("fault_queue", "queue overflow"),
                            ("fault_timer", "timer pool exhausted"),
                            ("fault_can", "duplicate CAN priority")]:
            ha = explore(load_model(model_path(name)))
            causes = fault_reachable(ha)
            assert any(c.startswith(cause) for c in causes), (name, causes)
            found[name] = cause
        assert len(found) == 3


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 99), min_size=1, max_size=8, unique=True), st.data())
def _can_property(prios, data):
    priorities = dict(enumerate(prios))
    order = data.draw(st.permutations(list(priorities)))
    other = data.draw(st.permutations(list(priorities)))
    sequence = deliveries(priorities, order)
    assert sequence == sorted(prios)
    assert deliveries(priorities, other) == sequence


def test_criterion_5_can_determinism():
    with criterion(5, "100 random buffers of 1-8 messages"):
        _can_property()


def test_criterion_6_oracle_equivalence():
    sizes = []
    with criterion(6):
        for name, queues in [("pingpong", {}), ("fanin", {"col": 2}), ("ring", {})]:
            model = load_model(model_path(name))
            tr = Translator(model, ExplorationLimits(queue=queues))
            tr.explore()
            states, _ = oracle.reachable(model, queues)
            mine = {oracle.project_configuration(c) for c in tr.configurations}
            assert {oracle.project(s) for s in states} == mine, name
            sizes.append(f"{name} {len(mine)}")
    RESULTS[6] += f" ({', '.join(sizes)} states)"


def test_criterion_7_aggregation_equivalence():
    worst = 0.0
    with criterion(7):
        pairs = [("heater", full_ha("heater"), 10.0), ("delay_tank", full_ha("delay_tank"), 3.0)]
        full, _ = bbw_pair()
        pairs.append(("bbw", full, 2.0))
        for name, ha, horizon in pairs:
            report = equivalence_check(ha, aggregate(ha), horizon, 1e-3)
            assert report.same_locations and report.same_times, (name, report.first_mismatch)
            assert report.max_deviation <= 1e-6, (name, report.max_deviation)
            worst = max(worst, report.max_deviation)
    RESULTS[7] += f" (max deviation {worst:g})"


def _element_counts(text):
    comp = ET.fromstring(text.encode("iso-8859-1")).find(f"{{{NAMESPACE}}}component")
    return (len(comp.findall(f"{{{NAMESPACE}}}location")),
            len(comp.findall(f"{{{NAMESPACE}}}transition")))


def test_criterion_8_emission_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    bbw = str(MODELS / "bbw.hrebeca")
    limits = ["--queue", "bctlr=4", "--queue", "wctlrR=2", "--queue", "wctlrL=2",
              "--timer-pool", "1", "--arg-pool", "11"]
    with criterion(8):
        for fmt, ext in (("spaceex", ".xml"), ("json", ".ha.json")):
            for k in (1, 2):
                assert main(["translate", bbw, *limits, "--aggregate", "--format", fmt,
                             "-o", f"run{k}"]) == 0
            first = (tmp_path / f"run1{ext}").read_bytes()
            assert first == (tmp_path / f"run2{ext}").read_bytes()
        assert (tmp_path / "run1.cfg").read_bytes() == (tmp_path / "run2.cfg").read_bytes()
        full, reduced = bbw_pair()
        for ha in (full, reduced, full_ha("heater")):
            n, m, _ = ham.stats(ha)
            assert _element_counts(emit_spaceex(ha)[0]) == (n, m)
            assert emit_json(ha) == emit_json(ha)
    capsys.readouterr()


def test_criterion_9_urgency_audit():
    with criterion(9):
        full, _ = bbw_pair()
        for ha in (full_ha("heater"), full_ha("delay_tank"), full_ha("fault_can"), full):
            assert any(loc.urgent for loc in ha.locations.values())
            assert urgency_audit(ha, emit_spaceex(ha)[0]) == []
