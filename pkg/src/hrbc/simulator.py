"""Numeric simulation of hybrid automata.

Flows are integrated with fixed-step RK4.  Urgent locations take no time:
their edges are resolved at the current instant.  In other locations an
edge fires as soon as its guard becomes true; equality atoms ``a == b`` are
detected as sign changes of ``a - b`` within a step and located by
bisection.  Right after a jump, equality atoms count as satisfied when they
hold within the guard tolerance, which lets simultaneous events fire
together.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .expr import Binary, Bool, Expr, Num, conjuncts, evaluate, to_python
from .ha import HybridAutomaton
from .predicate import LOC_PREFIX, check_predicate, parse_predicate
from .reducer import PSEUDO_INITIAL

POLICIES = ("first", "random", "urgent-asap")

_RELAX = {"<=": "{a} <= {b} + tol", "<": "{a} < {b} + tol",
          ">=": "{a} >= {b} - tol", ">": "{a} > {b} - tol"}


def _div(a, b):
    # Guards are conjunctions whose atoms are evaluated in any order, so a
    # quotient may be computed before the atom that rules out a zero divisor.
    return a / b if b != 0 else math.nan


_GLOBALS = {"_div": _div, "_np": np, "abs": abs}


@dataclass
class Trace:
    """One run: grid samples plus every discrete jump."""

    variables: tuple
    location_names: dict
    samples: list = field(default_factory=list)  # (time, location id, valuation tuple)
    taken_edges: list = field(default_factory=list)  # (time, transition index)
    visits: list = field(default_factory=list)  # (time, name) per non-urgent entry
    status: str = "ok"  # ok | blocked | zeno | diverged
    message: str = ""

    def valuation(self, k: int) -> dict:
        return dict(zip(self.variables, self.samples[k][2]))

    def location_name(self, k: int) -> str:
        return self.location_names[self.samples[k][1]]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("time", "location") + tuple(self.variables))
        for time, loc, vals in self.samples:
            writer.writerow([repr(time), self.location_names[loc]] + [repr(v) for v in vals])
        return out.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())


@dataclass
class _Edge:
    index: int
    target: int
    guard: object  # (x, tol) -> bool, equality within tol
    equalities: list  # residual functions x -> float
    others: list  # exact atom functions x -> bool
    assign: object  # x -> new x


@dataclass
class _Loc:
    flow: object
    invariant: object  # (x, tol) -> bool, relaxed by tol
    edges: Optional[list] = None


def _relaxed(e: Expr, name_of) -> str:
    if isinstance(e, Binary) and e.op in _RELAX:
        a, b = to_python(e.left, name_of), to_python(e.right, name_of)
        return "(" + _RELAX[e.op].format(a=a, b=b) + ")"
    if isinstance(e, Binary) and e.op in ("&&", "||"):
        op = " and " if e.op == "&&" else " or "
        return "(" + _relaxed(e.left, name_of) + op + _relaxed(e.right, name_of) + ")"
    return to_python(e, name_of, "tol")


class _Compiler:
    """Turns expressions into Python functions over a state vector."""

    def __init__(self, variables):
        self.index = {v: i for i, v in enumerate(variables)}
        self.n = len(variables)

    def name_of(self, v: str) -> str:
        return f"x[{self.index[v]}]"

    def build(self, defs: list) -> list:
        """``defs`` are (params, body) pairs; returns one function per pair."""
        lines = []
        for k, (params, body) in enumerate(defs):
            lines.append(f"def _f{k}({params}):")
            lines.extend("    " + line for line in body.split("\n"))
        scope = dict(_GLOBALS)
        exec(compile("\n".join(lines) or "pass", "<hrbc-sim>", "exec"), scope)
        return [scope[f"_f{k}"] for k in range(len(defs))]

    def flow_def(self, flows: dict, urgent: bool):
        if urgent or not flows:
            return ("x", f"return _np.zeros({self.n})")
        items = ", ".join(to_python(flows.get(v, Num(0)), self.name_of) for v in self.index)
        return ("x", f"return _np.array([{items}], dtype=float)")

    def assign_def(self, assignments):
        if not assignments:
            return ("x", "return x")
        body = ["y = x.copy()"]
        body += [f"y[{self.index[v]}] = {to_python(e, self.name_of)}" for v, e in assignments]
        return ("x", "\n".join(body + ["return y"]))


class _Simulator:
    def __init__(self, ha: HybridAutomaton, dt: float, policy: str, seed: int,
                 guard_tol: Optional[float], max_jumps: int, event_width: Optional[float]):
        self.ha = ha
        self.dt = dt
        self.policy = policy
        self.rng = random.Random(seed)
        self.max_jumps = max_jumps
        self.width = event_width if event_width is not None else dt * 1e-6
        self.comp = _Compiler(ha.variables)
        self.locs = {}
        self.tol = guard_tol if guard_tol is not None else dt * max(1.0, self._flow_bound())
        self.trace = Trace(ha.variables, {i: loc.name for i, loc in ha.locations.items()})

    def _flow_bound(self) -> float:
        """Largest flow magnitude at the initial valuation, over distinct flows."""
        env = self.ha.initial_valuation()
        exprs = {e for loc in self.ha.locations.values() if not loc.urgent
                 for e in loc.flows.values()}
        bound = 0.0
        for e in exprs:
            try:
                bound = max(bound, abs(float(evaluate(e, env))))
            except (ZeroDivisionError, KeyError, TypeError):
                continue
        return bound

    def loc(self, ident: int) -> _Loc:
        c = self.locs.get(ident)
        if c is None:
            loc = self.ha.locations[ident]
            inv = "return True" if loc.urgent else f"return {_relaxed(loc.invariant, self.comp.name_of)}"
            flow, invariant = self.comp.build([self.comp.flow_def(loc.flows, loc.urgent),
                                               ("x, tol", inv)])
            c = self.locs[ident] = _Loc(flow, invariant)
        return c

    def edges(self, ident: int) -> list:
        c = self.loc(ident)
        if c.edges is None:
            name_of = self.comp.name_of
            defs, shapes = [], []
            for k in self.ha.outgoing(ident):
                t = self.ha.transitions[k]
                defs.append(("x, tol", f"return {to_python(t.guard, name_of, 'tol')}"))
                defs.append(self.comp.assign_def(t.assignments))
                eqs, others = [], []
                for atom in conjuncts(t.guard):
                    if isinstance(atom, Bool) and atom.value:
                        continue
                    if isinstance(atom, Binary) and atom.op == "==":
                        a, b = to_python(atom.left, name_of), to_python(atom.right, name_of)
                        eqs.append(len(defs))
                        defs.append(("x", f"return ({a}) - ({b})"))
                    else:
                        others.append(len(defs))
                        defs.append(("x", f"return {to_python(atom, name_of)}"))
                shapes.append((k, t.target, eqs, others))
            fns = self.comp.build(defs)
            c.edges = []
            pos = 0  # each edge owns guard, assign, then its atoms
            for k, target, eqs, others in shapes:
                guard, assign = fns[pos], fns[pos + 1]
                pos += 2 + len(eqs) + len(others)
                c.edges.append(_Edge(k, target, guard, [fns[i] for i in eqs],
                                     [fns[i] for i in others], assign))
        return c.edges

    def rk4(self, flow, x, h):
        if h <= 0:
            return x
        k1 = flow(x)
        k2 = flow(x + (h / 2) * k1)
        k3 = flow(x + (h / 2) * k2)
        k4 = flow(x + h * k3)
        return x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)

    def stop(self, status: str, message: str) -> None:
        self.trace.status = status
        self.trace.message = message

    def enter(self, ident: int) -> None:
        self.current = ident
        if not self.ha.locations[ident].urgent:
            self.trace.visits.append((self.t, self.ha.locations[ident].name))

    def settle(self) -> bool:
        """Take enabled edges at the current instant until none is enabled.
        Returns whether any edge fired."""
        fired = False
        jumps = 0
        while True:
            here = self.ha.locations[self.current]
            enabled = []
            for e in self.edges(self.current):
                if not e.guard(self.x, self.tol):
                    continue
                y = e.assign(self.x)
                if self.loc(e.target).invariant(y, self.tol):
                    enabled.append((e, y))
            if not enabled:
                if here.urgent:
                    self.stop("blocked", f"no enabled edge in urgent location {here.name} "
                                         f"at t={self.t:g}")
                return fired
            e, y = self.choose(enabled, here.urgent)
            self.x = y
            self.trace.taken_edges.append((self.t, e.index))
            self.enter(e.target)
            fired = True
            jumps += 1
            if jumps > self.max_jumps:
                self.stop("zeno", f"more than {self.max_jumps} jumps at t={self.t:g}")
                return fired

    def choose(self, enabled: list, urgent: bool):
        if self.policy == "first" or (self.policy == "urgent-asap" and urgent):
            return enabled[0]
        return enabled[self.rng.randrange(len(enabled))]

    def bisect(self, pred, lo: float, hi: float):
        """Shrink [lo, hi] with pred(lo) false and pred(hi) true."""
        while hi - lo > self.width:
            mid = (lo + hi) / 2
            if pred(mid):
                hi = mid
            else:
                lo = mid
        return lo, hi

    def advance(self, target: float) -> None:
        """Integrate towards ``target``, stopping early at the first event."""
        loc = self.loc(self.current)
        x0, h = self.x, target - self.t
        x1 = self.rk4(loc.flow, x0, h)
        if not np.all(np.isfinite(x1)):
            self.stop("diverged", f"non-finite valuation after t={self.t:g}")
            return
        boundary = False
        if not loc.invariant(x1, self.tol):
            if not loc.invariant(x0, self.tol):
                self.stop("blocked", f"invariant of {self.ha.locations[self.current].name} "
                                     f"violated at t={self.t:g}")
                return
            h, _ = self.bisect(lambda s: not loc.invariant(self.rk4(loc.flow, x0, s), self.tol),
                               0.0, h)
            x1 = self.rk4(loc.flow, x0, h)
            boundary = True
        armed = []
        for e in self.edges(self.current):
            r0 = [g(x0) for g in e.equalities]
            if any(r == 0 for r in r0):
                continue
            if not r0 and all(a(x0) for a in e.others):
                continue
            armed.append((e, r0))

        def crossed(y):
            for e, r0 in armed:
                ok = True
                for g, r in zip(e.equalities, r0):
                    v = g(y)
                    if not (v == 0 or (v > 0) != (r > 0)):
                        ok = False
                        break
                if ok and all(a(y) for a in e.others):
                    return True
            return False

        if armed and crossed(x1):
            _, s = self.bisect(lambda s: crossed(self.rk4(loc.flow, x0, s)), 0.0, h)
            self.x = self.rk4(loc.flow, x0, s)
            self.t += s
            self.settle()
            return
        self.x = x1
        self.t = target if not boundary else self.t + h
        if boundary and not self.settle() and self.trace.status == "ok":
            self.stop("blocked", f"invariant of {self.ha.locations[self.current].name} "
                                 f"reached at t={self.t:g} with no enabled edge")

    def run(self, horizon: float) -> Trace:
        ha = self.ha
        init = ha.initial_valuation()
        self.x = np.array([float(init[v]) for v in ha.variables], dtype=float)
        self.t = 0.0
        self.enter(ha.initial_location)
        if not ha.locations[self.current].urgent and not self.loc(self.current).invariant(self.x, self.tol):
            self.stop("blocked", "initial valuation violates the initial invariant")
            return self.trace
        self.settle()
        steps = int(round(horizon / self.dt))
        if self.trace.status == "ok":
            self.sample()
        for k in range(1, steps + 1):
            target = k * self.dt
            while self.trace.status == "ok" and self.t < target:
                if target - self.t <= 1e-12 * max(1.0, target):
                    self.t = target
                    break
                self.advance(target)
            if self.trace.status != "ok":
                break
            self.sample()
        return self.trace

    def sample(self) -> None:
        self.trace.samples.append((self.t, self.current, tuple(float(v) for v in self.x)))


def simulate(ha: HybridAutomaton, horizon: float, dt: float = 1e-3, policy: str = "first",
             seed: int = 0, guard_tol: Optional[float] = None, max_jumps: int = 10000,
             event_width: Optional[float] = None) -> Trace:
    """Simulate ``ha`` from its initial valuation up to ``horizon`` seconds.

    Samples are taken on the grid ``k * dt``.  ``policy`` resolves a choice
    between simultaneously enabled edges: ``first`` takes the lowest index,
    ``random`` draws uniformly, ``urgent-asap`` takes the lowest index in
    urgent locations and draws in the others.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not horizon >= 0:
        raise ValueError("horizon must not be negative")
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r} (expected one of {', '.join(POLICIES)})")
    if guard_tol is not None and guard_tol < 0:
        raise ValueError("guard tolerance must not be negative")
    sim = _Simulator(ha, float(dt), policy, seed, guard_tol, max_jumps, event_width)
    with np.errstate(over="ignore", invalid="ignore"):  # divergence is reported in the trace
        return sim.run(float(horizon))


@dataclass(frozen=True)
class Verdict:
    safe: bool
    time: Optional[float] = None
    location: Optional[str] = None
    sample: Optional[int] = None

    def __str__(self):
        return "SAFE" if self.safe else f"WITNESS t={self.time:g} loc={self.location}"


def compile_predicate(pred, variables):
    """``pred`` (text or parsed) as a function of (valuation tuple, location name)."""
    if isinstance(pred, str):
        pred = parse_predicate(pred)
    index = {v: i for i, v in enumerate(variables)}

    def name_of(v):
        if v.startswith(LOC_PREFIX):
            return f"(loc == {v[len(LOC_PREFIX):]!r})"
        if v not in index:
            raise KeyError(v)
        return f"x[{index[v]}]"

    scope = dict(_GLOBALS)
    exec(compile(f"def _p(x, loc):\n    return bool({to_python(pred, name_of)})", "<hrbc-pred>",
                 "exec"), scope)
    return scope["_p"]


def check_forbidden(trace: Trace, pred, ha: Optional[HybridAutomaton] = None) -> Verdict:
    """First sample satisfying ``pred``, or a safe verdict."""
    if isinstance(pred, str):
        pred = parse_predicate(pred)
    if ha is not None:
        check_predicate(pred, ha)
    test = compile_predicate(pred, trace.variables)
    for k, (time, loc, vals) in enumerate(trace.samples):
        name = trace.location_names[loc]
        if test(vals, name):
            return Verdict(False, time, name, k)
    return Verdict(True)


@dataclass
class EquivalenceReport:
    max_deviation: float
    same_locations: bool
    same_times: bool
    samples: int
    first_mismatch: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.same_locations and self.same_times


def _visit_names(trace: Trace) -> list:
    names = [name for _, name in trace.visits]
    while names and names[0] == PSEUDO_INITIAL:
        names.pop(0)
    return names


def equivalence_check(full: HybridAutomaton, reduced: HybridAutomaton, horizon: float,
                      dt: float = 1e-3, policy: str = "first", seed: int = 0,
                      guard_tol: Optional[float] = None) -> EquivalenceReport:
    """Simulate both automata and compare them sample by sample.

    Locations are compared by name, so the reduced automaton must keep the
    names of the non-urgent locations it inherits.
    """
    a = simulate(full, horizon, dt, policy, seed, guard_tol)
    b = simulate(reduced, horizon, dt, policy, seed, guard_tol)
    mismatch = None
    same_times = len(a.samples) == len(b.samples) and a.status == b.status
    if not same_times:
        mismatch = f"sample count {len(a.samples)} vs {len(b.samples)} ({a.status}/{b.status})"
    shared = [v for v in a.variables if v in set(b.variables)]
    ia = [a.variables.index(v) for v in shared]
    ib = [b.variables.index(v) for v in shared]
    deviation = 0.0
    same_locations = True
    for k, (sa, sb) in enumerate(zip(a.samples, b.samples)):
        if sa[0] != sb[0]:
            same_times = False
            mismatch = mismatch or f"sample {k}: time {sa[0]} vs {sb[0]}"
        if a.location_names[sa[1]] != b.location_names[sb[1]]:
            same_locations = False
            mismatch = mismatch or (f"t={sa[0]:g}: {a.location_names[sa[1]]} vs "
                                    f"{b.location_names[sb[1]]}")
        for i, j in zip(ia, ib):
            deviation = max(deviation, abs(sa[2][i] - sb[2][j]))
    if _visit_names(a) != _visit_names(b):
        same_locations = False
        mismatch = mismatch or "non-urgent location sequences differ"
    return EquivalenceReport(deviation, same_locations, same_times, min(len(a.samples), len(b.samples)),
                             mismatch)


__all__ = ["simulate", "check_forbidden", "compile_predicate", "equivalence_check", "Trace",
           "Verdict", "EquivalenceReport", "POLICIES"]
