"""Derivation of the monolithic hybrid automaton of a checked model.

Configurations are explored breadth-first.  Each distinct configuration
becomes one location; each successor becomes one transition.  Continuous
values never enter a configuration: they live in automaton variables and are
manipulated through guards, assignments and flows.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional

from . import ha as ham
from .diagnostics import DiagnosticError, error
from .expr import (TRUE, Binary, Bool, Num, Unary, Var, conj, disjoint_cases, negate,
                   normalize, subst, to_text, variables)
from .frontend import ast
from .frontend.checker import CheckedModel

FAULT = "Fault"
ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))


class Urgency(str, Enum):
    MESSAGE = "message"  # a message or statement transition is enabled
    NETWORK = "network"
    NONURGENT = "nonurgent"
    TERMINAL = "terminal"


class Message(NamedTuple):
    sender: int
    msgsrv: str
    receiver: int
    # one entry per parameter: ("v", q) discrete value, ("p", k) arg-pool
    # slot, ("c", q) continuous literal, ("m", mode) for setMode
    args: tuple = ()


class PendingEvent(NamedTuple):
    delay: Fraction
    kind: str  # resume | transfer
    subject: object  # rebec index or Message
    timer: int


class RebecState(NamedTuple):
    vals: tuple  # int state variables, declaration order
    suspended: bool
    queue: tuple
    pc: tuple  # stack of (block id, statement index)
    env: tuple  # discrete parameters of the running message server
    mode: Optional[str]  # physical rebecs only; None is the idle mode


class Configuration(NamedTuple):
    rebecs: tuple
    buffer: tuple  # (priority, Message), sorted by priority
    ready: bool
    pending: tuple

    @property
    def network(self) -> tuple:
        return self.buffer, self.ready


class Step(NamedTuple):
    guard: object
    assignments: tuple
    target: object  # Configuration or FAULT
    cause: Optional[str] = None


@dataclass
class ExplorationLimits:
    queue_default: int = 1
    queue: dict = field(default_factory=dict)
    timer_pool: int = 1
    arg_pool: int = 4
    max_configs: int = 200_000

    def __post_init__(self):
        sizes = [self.queue_default, self.timer_pool, self.arg_pool, self.max_configs,
                 *self.queue.values()]
        if any(int(s) < 1 for s in sizes):
            raise ValueError("exploration limits must be positive")

    def queue_size(self, rebec: str) -> int:
        return self.queue.get(rebec, self.queue_default)


# compiled statements; expressions already use automaton variable names for
# continuous operands, leaving only discrete names to resolve at run time

class _Assign(NamedTuple):
    target: str
    kind: str  # state | param | cont
    expr: object
    span: object


class _If(NamedTuple):
    cond: object
    then: int
    orelse: Optional[int]
    span: object


class _Delay(NamedTuple):
    amount: Fraction
    span: object


class _SetMode(NamedTuple):
    mode: Optional[str]
    span: object


class _Send(NamedTuple):
    receiver: int
    msgsrv: str
    args: tuple  # expressions, or (mode,) for setMode
    kinds: tuple  # "v" | "c" | "m" per argument
    wire: bool
    priority: Optional[int]
    delay: Optional[Fraction]
    span: object


class _Mode(NamedTuple):
    invariant: object
    flows: dict
    guard: object
    actions: int


@dataclass
class _Rebec:
    index: int
    name: str
    physical: bool
    int_vars: tuple
    cont_vars: tuple  # automaton names of real/float state variables
    real_vars: tuple
    msgsrvs: dict  # name -> (block, [(param, continuous, automaton name)])
    modes: dict
    setmode_blocks: dict
    queue_size: int
    init_args: tuple


def timer_var(k: int) -> str:
    return f"t{k}"


def arg_var(k: int) -> str:
    return f"arg{k}"


def _zero_division(e) -> bool:
    if isinstance(e, Binary):
        if e.op == "/" and isinstance(e.right, Num) and e.right.value == 0:
            return True
        return _zero_division(e.left) or _zero_division(e.right)
    if isinstance(e, Unary):
        return _zero_division(e.operand)
    return False


class Translator:
    """Successor relation and exploration for one checked model."""

    def __init__(self, model: CheckedModel, limits: Optional[ExplorationLimits] = None,
                 canonical_slots: bool = True):
        self.model = model
        self.canonical_slots = canonical_slots
        self.limits = limits or ExplorationLimits()
        self.blocks = []
        self.rebecs = [self._compile(r) for r in model.rebecs]
        self.timer_vars = [timer_var(k) for k in range(self.limits.timer_pool)]
        self.arg_vars = [arg_var(k) for k in range(self.limits.arg_pool)]
        self.param_vars = [n for r in self.rebecs for _, (_, ps) in r.msgsrvs.items()
                           for _, cont, n in ps if cont]
        self.variables = ([v for r in self.rebecs for v in r.cont_vars] + self.param_vars
                          + self.timer_vars + self.arg_vars)

    # -- static compilation -------------------------------------------------

    def _block(self, stmts, compile_stmt) -> int:
        ident = len(self.blocks)
        self.blocks.append(None)
        self.blocks[ident] = tuple(compile_stmt(s) for s in stmts)
        return ident

    def _compile(self, info) -> _Rebec:
        cls = info.cls
        name = info.name
        cont = {v.name: f"{name}_{v.name}" for v in cls.state_vars if v.type != "int"}
        rebec = _Rebec(
            index=info.index, name=name, physical=cls.is_physical,
            int_vars=tuple(v.name for v in cls.state_vars if v.type == "int"),
            cont_vars=tuple(cont.values()),
            real_vars=tuple(cont[v.name] for v in cls.state_vars if v.type == "real"),
            msgsrvs={}, modes={}, setmode_blocks={},
            queue_size=int(self.limits.queue_size(name)), init_args=info.init_args)

        def compiler(scope):
            def ex(e):
                return normalize(subst(e, {k: Var(v) for k, v in scope.items()}))

            def stmt(s):
                if isinstance(s, ast.Assign):
                    if s.var in scope:
                        return _Assign(scope[s.var], "cont", ex(s.expr), s.span)
                    kind = "state" if s.var in rebec.int_vars else "param"
                    return _Assign(s.var, kind, ex(s.expr), s.span)
                if isinstance(s, ast.If):
                    then = self._block(s.then, stmt)
                    orelse = None if s.orelse is None else self._block(s.orelse, stmt)
                    return _If(ex(s.cond), then, orelse, s.span)
                if isinstance(s, ast.Delay):
                    amount = normalize(s.amount)
                    return _Delay(amount.value, s.span)
                if isinstance(s, ast.SetModeLocal):
                    return _SetMode(None if s.mode == "none" else s.mode, s.span)
                conn, receiver = self.model.route(info, s.target)
                wire = conn == "Wire"
                if isinstance(s, ast.SendSetMode):
                    msg, args, kinds = "setMode", (s.mode,), ("m",)
                else:
                    msg = s.msgsrv
                    params = receiver.cls.msgsrv(msg).params
                    args = tuple(ex(a) for a in s.args)
                    kinds = tuple("v" if p.type == "int" else "c" for p in params)
                key = (name, receiver.name, msg)
                prio = None if wire else self.model.priorities[key]
                delay = None if wire else self.model.delays[key]
                return _Send(receiver.index, msg, args, kinds, wire, prio, delay, s.span)
            return stmt

        for m in cls.msgsrvs:
            params = []
            scope = dict(cont)
            for p in m.params:
                if p.type == "int":
                    params.append((p.name, False, p.name))
                else:
                    var = f"{name}_{m.name}_{p.name}"
                    scope[p.name] = var
                    params.append((p.name, True, var))
            rebec.msgsrvs[m.name] = (self._block(m.body, compiler(scope)), params)
        stmt = compiler(cont)
        for mode in cls.modes:
            def ex(e):
                return normalize(subst(e, {k: Var(v) for k, v in cont.items()}))
            flows = {cont[f.var]: ex(f.expr) for f in mode.flows}
            rebec.modes[mode.name] = _Mode(ex(mode.invariant), flows, ex(mode.guard),
                                           self._block(mode.actions, stmt))
        if cls.is_physical:
            for m in [None, *rebec.modes]:
                rebec.setmode_blocks[m] = self._block((), stmt)
                self.blocks[rebec.setmode_blocks[m]] = (_SetMode(m, None),)
        return rebec

    # -- configurations -----------------------------------------------------

    def initial_configuration(self) -> Configuration:
        states = []
        for r in self.rebecs:
            _, params = r.msgsrvs["initial"]
            args = tuple(("c" if cont else "v", Fraction(a))
                         for (_, cont, _), a in zip(params, r.init_args))
            msg = Message(r.index, "initial", r.index, args)
            states.append(RebecState(tuple(Fraction(0) for _ in r.int_vars), False,
                                     (msg,), (), (), None))
        return Configuration(tuple(states), (), True, ())

    def urgency_class(self, cfg: Configuration) -> Urgency:
        for s in cfg.rebecs:
            if not s.suspended and (s.pc or s.queue):
                return Urgency.MESSAGE
        if cfg.buffer and cfg.ready:
            return Urgency.NETWORK
        if cfg.pending or any(s.mode is not None for s in cfg.rebecs):
            return Urgency.NONURGENT
        return Urgency.TERMINAL

    def used_timers(self, cfg: Configuration) -> set:
        return {p.timer for p in cfg.pending}

    def used_args(self, cfg: Configuration) -> set:
        return {k for m in _messages(cfg) for tag, k in m.args if tag == "p"}

    def _settle(self, pc: tuple) -> tuple:
        while pc:
            b, i = pc[-1]
            if i < len(self.blocks[b]):
                break
            pc = pc[:-1]
        return pc

    def _advance(self, s: RebecState, push: Optional[int] = None) -> RebecState:
        b, i = s.pc[-1]
        pc = s.pc[:-1] + ((b, i + 1),)
        if push is not None:
            pc += ((push, 0),)
        pc = self._settle(pc)
        return s._replace(pc=pc, env=s.env if pc else ())

    def _discrete(self, r: _Rebec, s: RebecState, e, span):
        mapping = {n: Num(v) for n, v in zip(r.int_vars, s.vals)}
        mapping.update((n, Num(v)) for n, v in s.env)
        out = subst(e, mapping)
        if _zero_division(out):
            raise DiagnosticError([error(f"division by zero in '{to_text(e)}' ({r.name})", span)])
        return out

    @staticmethod
    def _with_rebec(cfg: Configuration, i: int, s: RebecState) -> Configuration:
        rebecs = list(cfg.rebecs)
        rebecs[i] = s
        return cfg._replace(rebecs=tuple(rebecs))

    # -- successors -----------------------------------------------------------

    def successors(self, cfg: Configuration) -> list:
        """All outgoing steps of ``cfg`` in the highest enabled class."""
        urgency = self.urgency_class(cfg)
        if urgency is Urgency.MESSAGE:
            steps = self.successors_message(cfg) + self.successors_statement(cfg)
        elif urgency is Urgency.NETWORK:
            steps = [self.successor_network(cfg)]
        elif urgency is Urgency.NONURGENT:
            steps = self.successors_nonurgent(cfg)
        else:
            steps = []
        if self.canonical_slots:
            steps = [self.canonicalize(cfg, s) for s in steps]
        return steps

    def canonicalize(self, cfg: Configuration, step: Step) -> Step:
        """Renumber pool slots of the step's target in order of first use.

        Configurations that differ only in which slots hold which values are
        merged; the renaming travels on the transition as simultaneous
        assignments, so the valuation is permuted along with the slots.
        """
        nxt = step.target
        if nxt is FAULT:
            return step
        arg_order = list(dict.fromkeys(k for m in _messages(nxt) for tag, k in m.args if tag == "p"))
        timer_order = [p.timer for p in nxt.pending]
        if arg_order == list(range(len(arg_order))) and timer_order == list(range(len(timer_order))):
            return step
        amap = {old: new for new, old in enumerate(arg_order)}
        tmap = {old: new for new, old in enumerate(timer_order)}

        def msg(m):
            if not any(tag == "p" for tag, _ in m.args):
                return m
            return m._replace(args=tuple(("p", amap[k]) if tag == "p" else (tag, k) for tag, k in m.args))

        rebecs = tuple(s._replace(queue=tuple(map(msg, s.queue))) for s in nxt.rebecs)
        buffer = tuple((p, msg(m)) for p, m in nxt.buffer)
        pending = tuple(p._replace(timer=tmap[p.timer],
                                   subject=msg(p.subject) if p.kind == "transfer" else p.subject)
                        for p in nxt.pending)
        post = dict(step.assignments)
        pool = set(self.arg_vars) | set(self.timer_vars)
        out = [(v, e) for v, e in step.assignments if v not in pool]
        renames = ((arg_var, amap, self.used_args(cfg), len(self.arg_vars)),
                   (timer_var, tmap, self.used_timers(cfg), len(self.timer_vars)))
        for name_of, mapping, used_before, size in renames:
            source = {new: old for old, new in mapping.items()}
            for k in range(size):
                name = name_of(k)
                if k in source:
                    old = name_of(source[k])
                    value = post.get(old, Var(old))
                else:
                    value = ZERO
                    if k not in used_before and name not in post:
                        continue  # free before and after: already zero
                if value != Var(name):
                    out.append((name, value))
        return Step(step.guard, tuple(out), nxt._replace(rebecs=rebecs, buffer=buffer, pending=pending),
                    step.cause)

    def successors_message(self, cfg: Configuration) -> list:
        out = []
        for r, s in zip(self.rebecs, cfg.rebecs):
            if s.suspended or s.pc or not s.queue:
                continue
            msg = s.queue[0]
            s2 = s._replace(queue=s.queue[1:])
            assigns = []
            if msg.msgsrv == "setMode":
                mode = msg.args[0][1]
                mode = None if mode == "none" else mode
                s2 = s2._replace(pc=((r.setmode_blocks[mode], 0),), env=())
            else:
                block, params = r.msgsrvs[msg.msgsrv]
                env = []
                for (pname, cont, var), (tag, value) in zip(params, msg.args):
                    if not cont:
                        env.append((pname, value))
                    elif tag == "p":
                        assigns.append((var, Var(arg_var(value))))
                        assigns.append((arg_var(value), ZERO))
                    else:
                        assigns.append((var, Num(value)))
                pc = self._settle(((block, 0),))
                s2 = s2._replace(pc=pc, env=tuple(env) if pc else ())
            out.append(Step(TRUE, tuple(assigns), self._with_rebec(cfg, r.index, s2)))
        return out

    def successors_statement(self, cfg: Configuration) -> list:
        out = []
        for r, s in zip(self.rebecs, cfg.rebecs):
            if not s.suspended and s.pc:
                out.extend(self._execute(cfg, r, s))
        return out

    def _execute(self, cfg: Configuration, r: _Rebec, s: RebecState) -> list:
        b, i = s.pc[-1]
        st = self.blocks[b][i]
        if isinstance(st, _Assign):
            value = self._discrete(r, s, st.expr, st.span)
            if st.kind == "cont":
                return [Step(TRUE, ((st.target, value),), self._with_rebec(cfg, r.index, self._advance(s)))]
            if not isinstance(value, Num):
                raise DiagnosticError([error(f"'{st.target}' assigned a non-constant value", st.span)])
            q = Fraction(int(value.value))  # int semantics truncate toward zero
            if st.kind == "state":
                k = r.int_vars.index(st.target)
                s2 = s._replace(vals=s.vals[:k] + (q,) + s.vals[k + 1:])
            else:
                s2 = s._replace(env=tuple((n, q if n == st.target else v) for n, v in s.env))
            return [Step(TRUE, (), self._with_rebec(cfg, r.index, self._advance(s2)))]
        if isinstance(st, _If):
            cond = self._discrete(r, s, st.cond, st.span)
            if isinstance(cond, Bool):
                chosen = st.then if cond.value else st.orelse
                return [Step(TRUE, (), self._with_rebec(cfg, r.index, self._advance(s, chosen)))]
            out = []
            for branch, guard in ((st.then, cond), (st.orelse, negate(cond))):
                nxt = self._with_rebec(cfg, r.index, self._advance(s, branch))
                for case in disjoint_cases(guard):
                    out.append(Step(conj(case), (), nxt))
            return out
        if isinstance(st, _Delay):
            free = [k for k in range(self.limits.timer_pool) if k not in self.used_timers(cfg)]
            if not free:
                return [Step(TRUE, (), FAULT, f"timer pool exhausted ({r.name} delay)")]
            k = free[0]
            s2 = self._advance(s)._replace(suspended=True)
            nxt = self._with_rebec(cfg, r.index, s2)
            nxt = nxt._replace(pending=cfg.pending + (PendingEvent(st.amount, "resume", r.index, k),))
            return [Step(TRUE, ((timer_var(k), ZERO),), nxt)]
        if isinstance(st, _SetMode):
            s2 = self._advance(s)._replace(mode=st.mode)
            return [Step(TRUE, (), self._with_rebec(cfg, r.index, s2))]
        return [self._send(cfg, r, s, st)]

    def _send(self, cfg: Configuration, r: _Rebec, s: RebecState, st: _Send) -> Step:
        what = f"{r.name} -> {self.rebecs[st.receiver].name}.{st.msgsrv}"
        args, assigns = [], []
        used = self.used_args(cfg)
        for kind, a in zip(st.kinds, st.args):
            if kind == "m":
                args.append(("m", a))
                continue
            value = self._discrete(r, s, a, st.span)
            if kind == "v":
                args.append(("v", Fraction(int(value.value))))
                continue
            free = [k for k in range(self.limits.arg_pool) if k not in used]
            if not free:
                return Step(TRUE, (), FAULT, f"argument pool exhausted ({what})")
            used.add(free[0])
            args.append(("p", free[0]))
            assigns.append((arg_var(free[0]), value))
        msg = Message(r.index, st.msgsrv, st.receiver, tuple(args))
        nxt = self._with_rebec(cfg, r.index, self._advance(s))
        if st.wire:
            target = nxt.rebecs[st.receiver]
            if len(target.queue) >= self.rebecs[st.receiver].queue_size:
                return Step(TRUE, (), FAULT, f"queue overflow ({what})")
            nxt = self._with_rebec(nxt, st.receiver, target._replace(queue=target.queue + (msg,)))
        else:
            if any(p == st.priority for p, _ in cfg.buffer):
                return Step(TRUE, (), FAULT, f"duplicate CAN priority {st.priority} in buffer ({what})")
            buffer = tuple(sorted(cfg.buffer + ((st.priority, msg),)))
            nxt = nxt._replace(buffer=buffer)
        return Step(TRUE, tuple(assigns), nxt)

    def successor_network(self, cfg: Configuration) -> Step:
        if not cfg.buffer:
            raise ValueError("network transition needs a non-empty buffer")
        prio, msg = cfg.buffer[0]
        if len(cfg.buffer) > 1 and cfg.buffer[1][0] == prio:
            return Step(TRUE, (), FAULT, f"CAN priority tie at {prio}")
        free = [k for k in range(self.limits.timer_pool) if k not in self.used_timers(cfg)]
        if not free:
            return Step(TRUE, (), FAULT, "timer pool exhausted (CAN transfer)")
        k = free[0]
        sender = self.rebecs[msg.sender].name
        receiver = self.rebecs[msg.receiver].name
        delay = self.model.delays[(sender, receiver, msg.msgsrv)]
        nxt = cfg._replace(buffer=cfg.buffer[1:], ready=False,
                           pending=cfg.pending + (PendingEvent(delay, "transfer", msg, k),))
        return Step(TRUE, ((timer_var(k), ZERO),), nxt)

    def successors_nonurgent(self, cfg: Configuration) -> list:
        out = []
        for r, s in zip(self.rebecs, cfg.rebecs):
            if s.mode is None:
                continue
            mode = r.modes[s.mode]
            pc = self._settle(s.pc + ((mode.actions, 0),))
            nxt = self._with_rebec(cfg, r.index, s._replace(mode=None, pc=pc))
            for case in disjoint_cases(mode.guard):
                out.append(Step(conj(case), (), nxt))
        for j, p in enumerate(cfg.pending):
            t = timer_var(p.timer)
            guard = Binary("==", Var(t), Num(p.delay))
            rest = cfg._replace(pending=cfg.pending[:j] + cfg.pending[j + 1:])
            if p.kind == "resume":
                s = rest.rebecs[p.subject]
                nxt = self._with_rebec(rest, p.subject, s._replace(suspended=False))
            else:
                msg = p.subject
                s = rest.rebecs[msg.receiver]
                if len(s.queue) >= self.rebecs[msg.receiver].queue_size:
                    what = f"{self.rebecs[msg.sender].name} -> {self.rebecs[msg.receiver].name}.{msg.msgsrv}"
                    out.append(Step(guard, (), FAULT, f"queue overflow on CAN delivery ({what})"))
                    continue
                nxt = self._with_rebec(rest, msg.receiver, s._replace(queue=s.queue + (msg,)))
                nxt = nxt._replace(ready=True)
            out.append(Step(guard, ((t, ZERO),), nxt))
        return out

    # -- locations ------------------------------------------------------------

    def flows_and_invariant(self, cfg: Configuration) -> tuple:
        """(flows, invariant, urgent) of the location hosting ``cfg``."""
        if self.urgency_class(cfg) in (Urgency.MESSAGE, Urgency.NETWORK):
            return {}, TRUE, True
        flows = dict.fromkeys(self.variables, ZERO)
        invs = []
        for r, s in zip(self.rebecs, cfg.rebecs):
            if s.mode is not None:
                mode = r.modes[s.mode]
                flows.update(mode.flows)
                invs.append(mode.invariant)
        for p in cfg.pending:
            t = timer_var(p.timer)
            flows[t] = ONE
            invs.append(Binary("<=", Var(t), Num(p.delay)))
        return flows, conj(invs), False

    def location_name(self, ident: int, cfg: Configuration, urgent: bool) -> str:
        parts = [f"{'U' if urgent else 'L'}{ident}"]
        for r, s in zip(self.rebecs, cfg.rebecs):
            if s.mode is not None:
                parts.append(f"{r.name}_{s.mode}")
        return "_".join(parts)

    def explore(self) -> ham.HybridAutomaton:
        init = self.initial_configuration()
        ids = {init: 0}
        order = [init]
        edges = []
        fault_id = None
        next_id = 1
        frontier = deque([init])
        while frontier:
            cfg = frontier.popleft()
            src = ids[cfg]
            for step in self.successors(cfg):
                if step.target is FAULT:
                    if fault_id is None:
                        fault_id, next_id = next_id, next_id + 1
                    tgt = fault_id
                else:
                    tgt = ids.get(step.target)
                    if tgt is None:
                        if len(ids) >= self.limits.max_configs:
                            raise DiagnosticError([error(
                                f"state space exceeds the limit of {self.limits.max_configs} configurations"
                                " (raise --max-configs or shrink queues/pools)")])
                        tgt, next_id = next_id, next_id + 1
                        ids[step.target] = tgt
                        order.append(step.target)
                        frontier.append(step.target)
                edges.append(ham.Transition(src, tgt, step.guard, step.assignments, cause=step.cause))
        locations = []
        for cfg in order:
            ident = ids[cfg]
            flows, inv, urgent = self.flows_and_invariant(cfg)
            locations.append(ham.Location(ident, self.location_name(ident, cfg, urgent), flows, inv, urgent))
        if fault_id is not None:
            locations.append(ham.Location(fault_id, ham.FAULT_NAME, dict.fromkeys(self.variables, ZERO)))
        used = _referenced(locations, edges)
        keep = set(self.param_vars + self.timer_vars + self.arg_vars)
        names = [v for v in self.variables if v not in keep or v in used]
        dropped = set(self.variables) - set(names)
        if dropped:
            locations = [ham.Location(l.id, l.name, {v: e for v, e in l.flows.items() if v not in dropped},
                                      l.invariant, l.urgent) for l in locations]
            edges = [ham.Transition(t.source, t.target, t.guard,
                                    tuple((v, e) for v, e in t.assignments if v not in dropped),
                                    t.label, t.cause) for t in edges]
        automaton = ham.build(locations, edges, names, {0: ham.zero_init(names)}, 0)
        self.configurations = order  # discovery order, Fault excluded
        cycle = ham.find_urgent_cycle(automaton)
        if cycle is not None:
            raise DiagnosticError([error(
                f"instantaneous cycle through urgent locations: {ham.describe_cycle(automaton, cycle)}")])
        return automaton


def _messages(cfg: Configuration):
    """Messages in flight: queues by rebec, then the CAN buffer, then transfers."""
    for s in cfg.rebecs:
        yield from s.queue
    for _, m in cfg.buffer:
        yield m
    for p in cfg.pending:
        if p.kind == "transfer":
            yield p.subject


def _referenced(locations, edges) -> set:
    """Variables that can ever hold a non-zero value or are read."""
    used = set()
    for loc in locations:
        used |= variables(loc.invariant)
        for v, e in loc.flows.items():
            if e != ZERO:
                used.add(v)
            used |= variables(e)
    for t in edges:
        used |= variables(t.guard)
        for v, e in t.assignments:
            used |= variables(e)
            if e != ZERO:
                used.add(v)
    return used


def initial_configuration(model: CheckedModel, limits: Optional[ExplorationLimits] = None) -> Configuration:
    return Translator(model, limits).initial_configuration()


def explore(model: CheckedModel, limits: Optional[ExplorationLimits] = None) -> ham.HybridAutomaton:
    """Derive the full (unreduced) hybrid automaton of ``model``."""
    return Translator(model, limits).explore()
