"""Pretty printer; its output parses back to an equal tree."""

from __future__ import annotations

from ..expr import format_rational, to_text
from . import ast

INDENT = "    "


def pretty_print(model: ast.Model) -> str:
    out = []
    for c in model.consts:
        out.append(f"const {c.name} = {format_rational(c.value)};")
    if model.consts:
        out.append("")
    for cls in model.classes:
        out.extend(_class(cls))
        out.append("")
    out.extend(_main(model))
    return "\n".join(out) + "\n"


def _class(cls: ast.ClassDecl) -> list:
    kw = "physicalclass" if cls.is_physical else "softwareclass"
    lines = [f"{kw} {cls.name} {{"]
    lines.append(f"{INDENT}knownrebecs {{")
    lines += [f"{INDENT * 2}{k.class_name} {k.name};" for k in cls.known_rebecs]
    lines.append(f"{INDENT}}}")
    lines.append(f"{INDENT}statevars {{")
    lines += [f"{INDENT * 2}{v.type} {v.name};" for v in cls.state_vars]
    lines.append(f"{INDENT}}}")
    for m in cls.msgsrvs:
        params = ", ".join(f"{p.type} {p.name}" for p in m.params)
        lines += _block(f"msgsrv {m.name}({params}) ", m.body, 1)
    for mode in cls.modes:
        lines.append(f"{INDENT}mode {mode.name} {{")
        lines.append(f"{INDENT * 2}inv({to_text(mode.invariant)})")
        lines += [f"{INDENT * 2}{f.var}' = {to_text(f.expr)};" for f in mode.flows]
        lines.append(f"{INDENT * 2}guard({to_text(mode.guard)})")
        lines += _block("", mode.actions, 2)
        lines.append(f"{INDENT}}}")
    lines.append("}")
    return lines


def _block(head: str, stmts: tuple, depth: int) -> list:
    pad = INDENT * depth
    if not stmts:
        return [f"{pad}{head}{{ }}"]
    lines = [f"{pad}{head}{{"]
    for s in stmts:
        lines += _statement(s, depth + 1)
    lines.append(f"{pad}}}")
    return lines


def _statement(s, depth: int) -> list:
    pad = INDENT * depth
    if isinstance(s, ast.Assign):
        return [f"{pad}{s.var} = {to_text(s.expr)};"]
    if isinstance(s, ast.Delay):
        return [f"{pad}delay({to_text(s.amount)});"]
    if isinstance(s, ast.SetModeLocal):
        return [f"{pad}setmode({s.mode});"]
    if isinstance(s, ast.SendSetMode):
        return [f"{pad}{s.target}.setMode({s.mode});"]
    if isinstance(s, ast.Send):
        args = ", ".join(to_text(a) for a in s.args)
        return [f"{pad}{s.target}.{s.msgsrv}({args});"]
    if isinstance(s, ast.If):
        lines = _block(f"if ({to_text(s.cond)}) ", s.then, depth)
        if s.orelse is not None:
            tail = _block("else ", s.orelse, depth)
            tail[0] = tail[0].lstrip()
            lines[-1] = f"{lines[-1]} {tail[0]}"
            lines += tail[1:]
        return lines
    raise TypeError(f"unknown statement {s!r}")


def _main(model: ast.Model) -> list:
    lines = ["main {"]
    for inst in model.instances:
        binds = ", ".join(f"@{b.connection} {b.target}" for b in inst.bindings)
        args = ", ".join(format_rational(a) for a in inst.init_args)
        lines.append(f"{INDENT}{inst.class_name} {inst.name}({binds}):({args});")
    can = model.can_spec
    if can is not None:
        lines.append(f"{INDENT}CAN {{")
        lines.append(f"{INDENT * 2}priorities {{")
        lines += [f"{INDENT * 3}{e.sender} {e.receiver}.{e.msgsrv} {format_rational(e.value)};"
                  for e in can.priorities]
        lines.append(f"{INDENT * 2}}}")
        lines.append(f"{INDENT * 2}delays {{")
        lines += [f"{INDENT * 3}{e.sender} {e.receiver}.{e.msgsrv} -> {format_rational(e.value)};"
                  for e in can.delays]
        lines.append(f"{INDENT * 2}}}")
        lines.append(f"{INDENT}}}")
    lines.append("}")
    return lines
