"""Static checks and name resolution.

``check`` either returns a :class:`CheckedModel` (constants substituted,
instance graph resolved, CAN parameters looked up) or raises
``DiagnosticError`` carrying one diagnostic per violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from ..diagnostics import DiagnosticError, error
from ..expr import Binary, Bool, Num, Unary, Var, disjoint_cases, evaluate, normalize, subst
from . import ast

RESERVED_MODE = "none"


@dataclass(frozen=True)
class RebecInfo:
    index: int
    name: str
    cls: ast.ClassDecl
    bindings: dict  # known-rebec name -> (connection, instance name)
    init_args: tuple

    @property
    def is_physical(self) -> bool:
        return self.cls.is_physical


@dataclass
class CheckedModel:
    ast: ast.Model
    classes: dict
    rebecs: tuple
    consts: dict
    priorities: dict
    delays: dict
    warnings: list = field(default_factory=list)

    def rebec(self, name: str) -> RebecInfo:
        for r in self.rebecs:
            if r.name == name:
                return r
        raise KeyError(name)

    def route(self, sender: RebecInfo, target: str):
        """(connection, receiver) for a send from ``sender`` to known rebec ``target``."""
        if target == "self":
            return "Wire", sender
        conn, name = sender.bindings[target]
        return conn, self.rebec(name)


class _Scope:
    def __init__(self, cls: ast.ClassDecl, consts: dict, params=()):
        self.cls = cls
        self.types = {k.name: "rebec" for k in cls.known_rebecs}
        self.types.update({c: "const" for c in consts})
        self.types.update({v.name: v.type for v in cls.state_vars})
        self.types.update({p.name: p.type for p in params})
        self.known = {k.name: k.class_name for k in cls.known_rebecs}


class Checker:
    def __init__(self, model: ast.Model):
        self.model = model
        self.diags = []
        self.consts = {}
        self.classes = {}

    def err(self, message, span):
        self.diags.append(error(message, span))

    # -- expressions --------------------------------------------------------

    def expr_type(self, e, scope: _Scope):
        """(kind, continuous) where kind is 'num' or 'bool'; None on error."""
        if isinstance(e, Num):
            return "num", False
        if isinstance(e, Bool):
            return "bool", False
        if isinstance(e, Var):
            t = scope.types.get(e.name)
            if t is None:
                self.err(f"unknown name '{e.name}'", e.span)
                return None
            if t == "rebec":
                self.err(f"rebec '{e.name}' cannot be used as a value", e.span)
                return None
            return "num", t in ("real", "float")
        if isinstance(e, Unary):
            inner = self.expr_type(e.operand, scope)
            if inner is None:
                return None
            want = "num" if e.op == "-" else "bool"
            if inner[0] != want:
                self.err(f"operand of '{e.op}' must be {'numeric' if want == 'num' else 'boolean'}", e.span)
                return None
            return inner
        left = self.expr_type(e.left, scope)
        right = self.expr_type(e.right, scope)
        if left is None or right is None:
            return None
        cont = left[1] or right[1]
        if e.op in ("&&", "||"):
            if left[0] != "bool" or right[0] != "bool":
                self.err(f"operands of '{e.op}' must be boolean", e.span)
                return None
            return "bool", cont
        if e.op in ("==", "!=") and left[0] == right[0] == "bool":
            return "bool", cont
        if left[0] != "num" or right[0] != "num":
            self.err(f"operands of '{e.op}' must be numeric", e.span)
            return None
        return ("bool" if e.op in ("<", "<=", ">", ">=", "==", "!=") else "num"), cont

    def expect_bool(self, e, scope, what):
        t = self.expr_type(e, scope)
        if t is not None and t[0] != "bool":
            self.err(f"{what} must be a boolean expression", e.span)
        return t

    def expect_num(self, e, scope, what):
        t = self.expr_type(e, scope)
        if t is not None and t[0] != "num":
            self.err(f"{what} must be a numeric expression", e.span)
        return t

    # -- statements ---------------------------------------------------------

    def statements(self, stmts, scope: _Scope):
        for s in stmts:
            self.statement(s, scope)

    def statement(self, s, scope: _Scope):
        cls = scope.cls
        if isinstance(s, ast.Assign):
            t = scope.types.get(s.var)
            if t is None:
                self.err(f"assignment to unknown variable '{s.var}'", s.span)
            elif t == "const":
                self.err(f"cannot assign to constant '{s.var}'", s.span)
            elif t == "rebec":
                self.err(f"cannot assign to known rebec '{s.var}'", s.span)
            value = self.expect_num(s.expr, scope, "assigned value")
            if t == "int" and value is not None and value[1]:
                self.err(f"cannot assign a continuous value to int variable '{s.var}'", s.span)
        elif isinstance(s, ast.If):
            self.expect_bool(s.cond, scope, "condition")
            self.statements(s.then, scope)
            if s.orelse is not None:
                self.statements(s.orelse, scope)
        elif isinstance(s, ast.Delay):
            if cls.is_physical:
                self.err("delay statements are not allowed in physical classes", s.span)
            t = self.expect_num(s.amount, scope, "delay")
            if t is not None and t[0] == "num":
                amount = self.const_value(s.amount)
                if amount is None:
                    self.err("delay must be a constant expression", s.span)
                elif amount <= 0:
                    self.err("delay must be positive", s.span)
        elif isinstance(s, ast.SetModeLocal):
            if not cls.is_physical:
                self.err("setmode is only allowed in physical classes", s.span)
            elif s.mode != RESERVED_MODE and cls.mode(s.mode) is None:
                self.err(f"unknown mode '{s.mode}' in class '{cls.name}'", s.span)
        elif isinstance(s, (ast.Send, ast.SendSetMode)):
            target_cls = self.send_target(s, scope)
            if target_cls is None:
                return
            if isinstance(s, ast.SendSetMode):
                if not target_cls.is_physical:
                    self.err(f"setMode sent to software class '{target_cls.name}'", s.span)
                elif s.mode != RESERVED_MODE and target_cls.mode(s.mode) is None:
                    self.err(f"unknown mode '{s.mode}' in class '{target_cls.name}'", s.span)
                return
            srv = target_cls.msgsrv(s.msgsrv)
            if srv is None:
                self.err(f"class '{target_cls.name}' has no message server '{s.msgsrv}'", s.span)
                for a in s.args:
                    self.expr_type(a, scope)
                return
            if len(srv.params) != len(s.args):
                self.err(f"'{s.msgsrv}' expects {len(srv.params)} argument(s), got {len(s.args)}", s.span)
            for p, a in zip(srv.params, s.args):
                t = self.expect_num(a, scope, "argument")
                if p.type == "int" and t is not None and t[1]:
                    self.err(f"continuous value passed to int parameter '{p.name}'", a.span or s.span)
        else:
            raise TypeError(s)

    def send_target(self, s, scope: _Scope) -> Optional[ast.ClassDecl]:
        if s.target == "self":
            return scope.cls
        if s.target not in scope.known:
            self.err(f"send target '{s.target}' is not a known rebec", s.span)
            return None
        return self.classes.get(scope.known[s.target])

    def const_value(self, e) -> Optional[Fraction]:
        e = normalize(subst(e, {k: Num(v) for k, v in self.consts.items()}))
        return e.value if isinstance(e, Num) else None

    # -- declarations -------------------------------------------------------

    def check_class(self, cls: ast.ClassDecl):
        seen = {}
        for k in cls.known_rebecs:
            if k.class_name not in self.classes:
                self.err(f"unknown class '{k.class_name}'", k.span)
            if k.name in seen:
                self.err(f"duplicate name '{k.name}'", k.span)
            seen[k.name] = k
        for v in cls.state_vars:
            if v.name in seen:
                self.err(f"duplicate name '{v.name}'", v.span)
            if v.name in self.consts:
                self.err(f"state variable '{v.name}' shadows a constant", v.span)
            seen[v.name] = v
            self.check_type_placement(cls, v.type, v.name, v.span)
        if cls.msgsrv("initial") is None:
            self.err(f"class '{cls.name}' has no 'initial' message server", cls.span)
        names = set()
        for m in cls.msgsrvs:
            if m.name in names:
                self.err(f"duplicate message server '{m.name}'", m.span)
            if m.name == "setMode":
                self.err("'setMode' is a reserved message server name", m.span)
            names.add(m.name)
            pnames = set()
            for p in m.params:
                if p.name in pnames or p.name in seen or p.name in self.consts:
                    self.err(f"parameter '{p.name}' clashes with another name", p.span)
                pnames.add(p.name)
                self.check_type_placement(cls, p.type, p.name, p.span)
            self.statements(m.body, _Scope(cls, self.consts, m.params))
        if cls.modes and not cls.is_physical:
            self.err("modes are only allowed in physical classes", cls.modes[0].span)
        modes = set()
        for mode in cls.modes:
            if mode.name == RESERVED_MODE:
                self.err("mode name 'none' is reserved", mode.span)
            if mode.name in modes:
                self.err(f"duplicate mode '{mode.name}'", mode.span)
            modes.add(mode.name)
            scope = _Scope(cls, self.consts)
            t = self.expect_bool(mode.invariant, scope, "invariant")
            if t is not None and t[0] == "bool":
                try:
                    ok = len(disjoint_cases(mode.invariant)) <= 1
                except ValueError:
                    ok = False
                if not ok:
                    self.err("mode invariant must be a conjunction of comparisons", mode.invariant.span or mode.span)
            flowed = set()
            for f in mode.flows:
                if cls.var_type(f.var) != "real":
                    self.err(f"flow for '{f.var}', which is not a real state variable", f.span)
                if f.var in flowed:
                    self.err(f"second flow for '{f.var}' in mode '{mode.name}'", f.span)
                flowed.add(f.var)
                self.expect_num(f.expr, scope, "flow")
            self.expect_bool(mode.guard, scope, "guard")
            self.statements(mode.actions, scope)

    def check_type_placement(self, cls, typ, name, span):
        if typ == "int" and cls.is_physical:
            self.err(f"int variable '{name}' is only allowed in software classes", span)
        if typ == "real" and not cls.is_physical:
            self.err(f"real variable '{name}' is only allowed in physical classes", span)

    def check_instances(self):
        insts = {}
        for inst in self.model.instances:
            if inst.name in insts:
                self.err(f"duplicate rebec '{inst.name}'", inst.span)
            insts[inst.name] = inst
        for inst in self.model.instances:
            cls = self.classes.get(inst.class_name)
            if cls is None:
                self.err(f"unknown class '{inst.class_name}'", inst.span)
                continue
            if len(inst.bindings) != len(cls.known_rebecs):
                self.err(f"'{inst.name}' binds {len(inst.bindings)} known rebec(s); "
                         f"class '{cls.name}' declares {len(cls.known_rebecs)}", inst.span)
            for b, k in zip(inst.bindings, cls.known_rebecs):
                target = insts.get(b.target)
                if target is None:
                    self.err(f"unknown rebec '{b.target}'", b.span)
                elif target.class_name != k.class_name:
                    self.err(f"'{b.target}' is a {target.class_name}, but known rebec "
                             f"'{k.name}' expects {k.class_name}", b.span)
            init = cls.msgsrv("initial")
            if init is not None:
                if len(init.params) != len(inst.init_args):
                    self.err(f"'{inst.name}' passes {len(inst.init_args)} initial argument(s); "
                             f"'initial' takes {len(init.params)}", inst.span)
                for p, a in zip(init.params, inst.init_args):
                    if p.type == "int" and a.denominator != 1:
                        self.err(f"non-integer value for int parameter '{p.name}'", inst.span)
        return insts

    def check_can(self, insts):
        can = self.model.can_spec or ast.CanSpec()
        prios, delays = {}, {}
        by_value = {}
        for table, store in ((can.priorities, prios), (can.delays, delays)):
            for e in table:
                if e.sender not in insts:
                    self.err(f"unknown rebec '{e.sender}'", e.span)
                if e.receiver not in insts:
                    self.err(f"unknown rebec '{e.receiver}'", e.span)
                else:
                    rcls = self.classes.get(insts[e.receiver].class_name)
                    if rcls is not None and rcls.msgsrv(e.msgsrv) is None and e.msgsrv != "setMode":
                        self.err(f"'{e.receiver}' has no message server '{e.msgsrv}'", e.span)
                if e.key in store:
                    self.err(f"duplicate CAN entry for {e.sender} {e.receiver}.{e.msgsrv}", e.span)
                store[e.key] = e
        for e in can.priorities:
            if e.value.denominator != 1 or e.value <= 0:
                self.err("CAN priority must be a positive integer", e.span)
            if e.value in by_value:
                self.err(f"duplicate CAN priority {e.value}", e.span)
            by_value.setdefault(e.value, e)
        for e in can.delays:
            if e.value <= 0:
                self.err("CAN delay must be positive", e.span)
        # every message that can travel over a CAN edge needs both entries
        for inst in self.model.instances:
            cls = self.classes.get(inst.class_name)
            if cls is None:
                continue
            links = {k.name: b for k, b in zip(cls.known_rebecs, inst.bindings)}
            for s in _all_sends(cls):
                b = links.get(s.target)
                if b is None or b.connection != "CAN":
                    continue
                msg = "setMode" if isinstance(s, ast.SendSetMode) else s.msgsrv
                key = (inst.name, b.target, msg)
                where = f"{inst.name} {b.target}.{msg}"
                if key not in prios:
                    self.err(f"missing CAN priority for {where}", s.span)
                if key not in delays:
                    self.err(f"missing CAN delay for {where}", s.span)
        return ({k: int(e.value) for k, e in prios.items()},
                {k: e.value for k, e in delays.items()})

    def run(self) -> CheckedModel:
        for c in self.model.consts:
            if c.name in self.consts:
                self.err(f"duplicate constant '{c.name}'", c.span)
            self.consts[c.name] = c.value
        for cls in self.model.classes:
            if cls.name in self.classes:
                self.err(f"duplicate class '{cls.name}'", cls.span)
            self.classes.setdefault(cls.name, cls)
        for cls in self.model.classes:
            self.check_class(cls)
        insts = self.check_instances()
        prios, delays = self.check_can(insts)
        if self.diags:
            raise DiagnosticError(self.diags)
        resolved = {name: _substitute_consts(cls, self.consts) for name, cls in self.classes.items()}
        rebecs = []
        for i, inst in enumerate(self.model.instances):
            cls = resolved[inst.class_name]
            bindings = {k.name: (b.connection, b.target) for k, b in zip(cls.known_rebecs, inst.bindings)}
            rebecs.append(RebecInfo(i, inst.name, cls, bindings, tuple(inst.init_args)))
        return CheckedModel(self.model, resolved, tuple(rebecs), dict(self.consts), prios, delays)


def _all_sends(cls: ast.ClassDecl):
    def walk(stmts):
        for s in stmts:
            if isinstance(s, (ast.Send, ast.SendSetMode)):
                yield s
            elif isinstance(s, ast.If):
                yield from walk(s.then)
                if s.orelse is not None:
                    yield from walk(s.orelse)
    for m in cls.msgsrvs:
        yield from walk(m.body)
    for mode in cls.modes:
        yield from walk(mode.actions)


def _substitute_consts(cls: ast.ClassDecl, consts: dict) -> ast.ClassDecl:
    if not consts:
        return cls
    mapping = {k: Num(v) for k, v in consts.items()}

    def ex(e):
        return _keep_span(e, subst(e, mapping)) if _mentions(e, mapping) else e

    def st(s):
        if isinstance(s, ast.Assign):
            return replace(s, expr=ex(s.expr))
        if isinstance(s, ast.If):
            return replace(s, cond=ex(s.cond), then=tuple(map(st, s.then)),
                           orelse=None if s.orelse is None else tuple(map(st, s.orelse)))
        if isinstance(s, ast.Delay):
            return replace(s, amount=ex(s.amount))
        if isinstance(s, ast.Send):
            return replace(s, args=tuple(map(ex, s.args)))
        return s

    msgsrvs = tuple(replace(m, body=tuple(map(st, m.body))) for m in cls.msgsrvs)
    modes = tuple(
        replace(m, invariant=ex(m.invariant), guard=ex(m.guard),
                flows=tuple(replace(f, expr=ex(f.expr)) for f in m.flows),
                actions=tuple(map(st, m.actions)))
        for m in cls.modes)
    return replace(cls, msgsrvs=msgsrvs, modes=modes)


def _mentions(e, mapping) -> bool:
    if isinstance(e, Var):
        return e.name in mapping
    if isinstance(e, Unary):
        return _mentions(e.operand, mapping)
    if isinstance(e, Binary):
        return _mentions(e.left, mapping) or _mentions(e.right, mapping)
    return False


def _keep_span(old, new):
    if getattr(new, "span", None) is None and getattr(old, "span", None) is not None:
        return replace(new, span=old.span)
    return new


def check(model: ast.Model) -> CheckedModel:
    """Validate ``model``; raise ``DiagnosticError`` listing every violation."""
    return Checker(model).run()


__all__ = ["check", "CheckedModel", "RebecInfo", "RESERVED_MODE", "evaluate"]
