"""Brute-force interpreter for discrete, wire-only models.

It walks the syntax tree directly and shares nothing with the translator
apart from the checked model (instances, bindings, constants).  Rebecs
interleave statement by statement; a message is taken from a queue only by
an idle rebec.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from hrbc.expr import evaluate
from hrbc.frontend import ast


class Overflow(Exception):
    pass


def _int_vars(cls):
    return [v.name for v in cls.state_vars if v.type == "int"]


def initial_state(model):
    state = []
    for r in model.rebecs:
        vals = tuple(Fraction(0) for _ in _int_vars(r.cls))
        queue = ((r.index, "initial", tuple(Fraction(a) for a in r.init_args)),)
        state.append((vals, queue, (), ()))
    return tuple(state)


def _env(model, r, vals, env):
    scope = dict(model.consts)
    scope.update(zip(_int_vars(r.cls), vals))
    scope.update(env)
    return scope


def _step(model, sizes, state, i):
    """Successor states of rebec ``i``; raises Overflow on a full queue."""
    r = model.rebecs[i]
    vals, queue, cont, env = state[i]
    rebecs = list(state)
    if not cont:
        if not queue:
            return []
        (_, name, args), rest = queue[0], queue[1:]
        srv = r.cls.msgsrv(name)
        env = tuple((p.name, a) for p, a in zip(srv.params, args))
        cont = tuple(srv.body)
        rebecs[i] = (vals, rest, cont, env if cont else ())
        return [tuple(rebecs)]
    st, rest = cont[0], cont[1:]
    scope = _env(model, r, vals, env)
    if isinstance(st, ast.Assign):
        value = Fraction(int(evaluate(st.expr, scope)))
        names = _int_vars(r.cls)
        if st.var in names:
            k = names.index(st.var)
            vals = vals[:k] + (value,) + vals[k + 1:]
        else:
            env = tuple((n, value if n == st.var else v) for n, v in env)
    elif isinstance(st, ast.If):
        branch = st.then if evaluate(st.cond, scope) else (st.orelse or ())
        rest = tuple(branch) + rest
    elif isinstance(st, ast.Send):
        _, target = model.route(r, st.target)
        params = target.cls.msgsrv(st.msgsrv).params
        args = tuple(Fraction(int(evaluate(a, scope))) if p.type == "int" else Fraction(evaluate(a, scope))
                     for p, a in zip(params, st.args))
        tvals, tqueue, tcont, tenv = rebecs[target.index] if target.index != i else (
            vals, queue, rest, env)
        if len(tqueue) >= sizes.get(target.name, 1):
            raise Overflow(f"{r.name} -> {target.name}.{st.msgsrv}")
        if target.index == i:
            queue = queue + ((i, st.msgsrv, args),)
        else:
            rebecs[target.index] = (tvals, tqueue + ((i, st.msgsrv, args),), tcont, tenv)
    else:
        raise NotImplementedError(type(st).__name__)
    rebecs[i] = (vals, queue, rest, env if rest else ())
    return [tuple(rebecs)]


def reachable(model, sizes=None):
    """(set of reachable states, whether some queue can overflow)."""
    sizes = sizes or {}
    start = initial_state(model)
    seen = {start}
    frontier = deque([start])
    overflow = False
    while frontier:
        state = frontier.popleft()
        for i in range(len(state)):
            try:
                nexts = _step(model, sizes, state, i)
            except Overflow:
                overflow = True
                continue
            for nxt in nexts:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
    return seen, overflow


def project(state):
    """Comparable view of an oracle state."""
    return tuple((vals, queue, bool(cont), env) for vals, queue, cont, env in state)


def project_configuration(cfg):
    """The same view of a translator configuration."""
    out = []
    for s in cfg.rebecs:
        queue = tuple((m.sender, m.msgsrv, tuple(v for _, v in m.args)) for m in s.queue)
        out.append((s.vals, queue, bool(s.pc), tuple(s.env)))
    return tuple(out)
