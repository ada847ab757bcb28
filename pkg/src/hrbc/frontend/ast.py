"""Syntax tree for Hybrid Rebeca models.

Spans are carried for diagnostics but excluded from equality, so two trees
parsed from differently formatted sources compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from ..expr import Expr


def _span():
    return field(default=None, compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class ConstDecl:
    name: str
    value: Fraction
    span: object = _span()


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: str  # int | real | float
    span: object = _span()


@dataclass(frozen=True)
class KnownRebec:
    class_name: str
    name: str
    span: object = _span()


@dataclass(frozen=True)
class Param:
    type: str
    name: str
    span: object = _span()


# statements ---------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr
    span: object = _span()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: Optional[tuple] = None
    span: object = _span()


@dataclass(frozen=True)
class Delay:
    amount: Expr
    span: object = _span()


@dataclass(frozen=True)
class SetModeLocal:
    mode: str
    span: object = _span()


@dataclass(frozen=True)
class Send:
    target: str  # known rebec name or "self"
    msgsrv: str
    args: tuple
    span: object = _span()


@dataclass(frozen=True)
class SendSetMode:
    target: str
    mode: str
    span: object = _span()


Statement = Union[Assign, If, Delay, SetModeLocal, Send, SendSetMode]


# classes -------------------------------------------------------------------

@dataclass(frozen=True)
class MsgSrv:
    name: str
    params: tuple
    body: tuple
    span: object = _span()


@dataclass(frozen=True)
class Flow:
    var: str
    expr: Expr
    span: object = _span()


@dataclass(frozen=True)
class Mode:
    name: str
    invariant: Expr
    flows: tuple
    guard: Expr
    actions: tuple
    span: object = _span()


@dataclass(frozen=True)
class ClassDecl:
    kind: str  # software | physical
    name: str
    known_rebecs: tuple
    state_vars: tuple
    msgsrvs: tuple
    modes: tuple = ()
    span: object = _span()

    @property
    def is_physical(self) -> bool:
        return self.kind == "physical"

    def msgsrv(self, name: str) -> Optional[MsgSrv]:
        for m in self.msgsrvs:
            if m.name == name:
                return m
        return None

    def mode(self, name: str) -> Optional[Mode]:
        for m in self.modes:
            if m.name == name:
                return m
        return None

    def var_type(self, name: str) -> Optional[str]:
        for v in self.state_vars:
            if v.name == name:
                return v.type
        return None


# main block ----------------------------------------------------------------

@dataclass(frozen=True)
class Binding:
    connection: str  # Wire | CAN
    target: str
    span: object = _span()


@dataclass(frozen=True)
class InstanceDecl:
    class_name: str
    name: str
    bindings: tuple
    init_args: tuple
    span: object = _span()


@dataclass(frozen=True)
class CanEntry:
    sender: str
    receiver: str
    msgsrv: str
    value: Fraction
    span: object = _span()

    @property
    def key(self) -> tuple:
        return (self.sender, self.receiver, self.msgsrv)


@dataclass(frozen=True)
class CanSpec:
    priorities: tuple = ()
    delays: tuple = ()
    span: object = _span()

    def priority_map(self) -> dict:
        return {e.key: int(e.value) for e in self.priorities}

    def delay_map(self) -> dict:
        return {e.key: e.value for e in self.delays}


@dataclass(frozen=True)
class Model:
    consts: tuple
    classes: tuple
    instances: tuple
    can_spec: Optional[CanSpec] = None

    @property
    def software_classes(self) -> list:
        return [c for c in self.classes if not c.is_physical]

    @property
    def physical_classes(self) -> list:
        return [c for c in self.classes if c.is_physical]

    def class_named(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None


ModelAST = Model
