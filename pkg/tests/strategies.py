"""Hypothesis strategies shared by the property tests."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from hrbc.expr import Binary, Num, Unary, Var

VARS = ("x", "y", "z")

rationals = st.builds(Fraction, st.integers(-20, 20), st.sampled_from([1, 2, 4, 5, 10, 3]))


def arith(depth: int = 3):
    leaf = st.one_of(rationals.map(Num), st.sampled_from(VARS).map(Var))
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            st.builds(Binary, st.sampled_from(["+", "-", "*"]), inner, inner),
            st.builds(Unary, st.just("-"), inner),
        ),
        max_leaves=6,
    )


comparisons = st.builds(Binary, st.sampled_from(["<", "<=", ">", ">=", "==", "!="]), arith(), arith())


def booleans():
    return st.recursive(
        comparisons,
        lambda inner: st.one_of(
            st.builds(Binary, st.sampled_from(["&&", "||"]), inner, inner),
            st.builds(Unary, st.just("!"), inner),
        ),
        max_leaves=4,
    )


envs = st.fixed_dictionaries({v: rationals for v in VARS})


def _assignments():
    return st.lists(st.tuples(st.sampled_from(VARS), arith()), max_size=2,
                    unique_by=lambda p: p[0]).map(tuple)


@st.composite
def automata(draw, max_locations: int = 6):
    """Random automata over VARS whose urgent subgraph is acyclic.

    Edges between urgent locations always go to a higher id, so the
    aggregation never meets an instantaneous cycle.
    """
    from hrbc import ha as ham

    n = draw(st.integers(2, max_locations))
    urgent = [draw(st.booleans()) for _ in range(n)]
    locations = []
    for i in range(n):
        if urgent[i]:
            locations.append(ham.Location(i, f"U{i}", urgent=True))
        else:
            flows = {v: draw(arith()) for v in VARS}
            locations.append(ham.Location(i, f"L{i}", flows, draw(comparisons)))
    edges = []
    for _ in range(draw(st.integers(1, 3 * n))):
        src = draw(st.integers(0, n - 1))
        tgt = draw(st.integers(0, n - 1))
        if urgent[src] and urgent[tgt] and tgt <= src:
            continue
        guard = draw(st.one_of(st.just(Binary("==", Num(Fraction(0)), Num(Fraction(0)))),
                               comparisons))
        edges.append(ham.Transition(src, tgt, guard, draw(_assignments())))
    init = {0: ham.zero_init(VARS)}
    return ham.build(locations, edges, VARS, init, 0)
