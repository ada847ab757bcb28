"""Arithmetic/boolean expression trees.

The same node types are used by the parser, the hybrid automaton model, the
reducer and the simulator.  Numeric literals are exact ``Fraction`` values;
conversion to floats only happens when an expression is compiled for
numerical evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional, Union

__all__ = [
    "Num", "Bool", "Var", "Unary", "Binary", "Expr",
    "TRUE", "FALSE", "ARITH_OPS", "CMP_OPS", "BOOL_OPS",
    "num", "conj", "disj", "conjuncts",
    "normalize", "subst", "variables", "is_constant", "evaluate",
    "negate", "disjoint_cases", "is_nonlinear", "nonlinear_subterms",
    "format_rational", "to_text", "to_python",
]

ARITH_OPS = ("+", "-", "*", "/")
CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")
BOOL_OPS = ("&&", "||")

_PREC = {"||": 1, "&&": 2, "<": 3, "<=": 3, ">": 3, ">=": 3, "==": 3, "!=": 3,
         "+": 4, "-": 4, "*": 5, "/": 5}
_UNARY_PREC = 6
_ATOM_PREC = 7


@dataclass(frozen=True)
class Num:
    value: Fraction
    span: object = field(default=None, compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class Bool:
    value: bool
    span: object = field(default=None, compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    span: object = field(default=None, compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    span: object = field(default=None, compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: object = field(default=None, compare=False, hash=False, repr=False)


Expr = Union[Num, Bool, Var, Unary, Binary]

TRUE = Bool(True)
FALSE = Bool(False)


def num(value) -> Num:
    return Num(Fraction(value))


def conjuncts(e: Expr) -> list:
    """Flatten a (possibly nested) ``&&`` tree into its operands."""
    if isinstance(e, Binary) and e.op == "&&":
        return conjuncts(e.left) + conjuncts(e.right)
    return [e]


def _disjuncts(e: Expr) -> list:
    if isinstance(e, Binary) and e.op == "||":
        return _disjuncts(e.left) + _disjuncts(e.right)
    return [e]


def _chain(op: str, items: list) -> Expr:
    out = items[0]
    for item in items[1:]:
        out = Binary(op, out, item)
    return out


def conj(items: Iterable[Expr]) -> Expr:
    return normalize(_chain("&&", [TRUE, *items]))


def disj(items: Iterable[Expr]) -> Expr:
    return normalize(_chain("||", [FALSE, *items]))


# ---------------------------------------------------------------------------
# normalization


def _fold_arith(op: str, a: Fraction, b: Fraction) -> Optional[Fraction]:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        return None
    return a / b


def _fold_cmp(op: str, a, b) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    return a != b


def _normalize_junction(op: str, left: Expr, right: Expr) -> Expr:
    unit, zero = (True, False) if op == "&&" else (False, True)
    split = conjuncts if op == "&&" else _disjuncts
    items = []
    for item in split(left) + split(right):
        if isinstance(item, Bool):
            if item.value == zero:
                return Bool(zero)
            continue
        if item not in items:
            items.append(item)
    if not items:
        return Bool(unit)
    return _chain(op, items)


@lru_cache(maxsize=200_000)
def normalize(e: Expr) -> Expr:
    """Constant-fold rational literals, drop neutral elements and flatten
    ``&&``/``||`` chains.  The result is a fixed point of this function."""
    if isinstance(e, Var):
        return e if e.span is None else Var(e.name)
    if isinstance(e, (Num, Bool)):
        return e if e.span is None else type(e)(e.value)
    if isinstance(e, Unary):
        x = normalize(e.operand)
        if e.op == "-":
            if isinstance(x, Num):
                return Num(-x.value)
            if isinstance(x, Unary) and x.op == "-":
                return x.operand
            return Unary("-", x)
        if isinstance(x, Bool):
            return Bool(not x.value)
        if isinstance(x, Unary) and x.op == "!":
            return x.operand
        return Unary("!", x)
    op = e.op
    left = normalize(e.left)
    right = normalize(e.right)
    if op in BOOL_OPS:
        return _normalize_junction(op, left, right)
    if op in CMP_OPS:
        if isinstance(left, Num) and isinstance(right, Num):
            return Bool(_fold_cmp(op, left.value, right.value))
        if isinstance(left, Bool) and isinstance(right, Bool) and op in ("==", "!="):
            return Bool(_fold_cmp(op, left.value, right.value))
        return Binary(op, left, right)
    if isinstance(left, Num) and isinstance(right, Num):
        folded = _fold_arith(op, left.value, right.value)
        if folded is not None:
            return Num(folded)
        return Binary(op, left, right)
    lz = isinstance(left, Num) and left.value == 0
    rz = isinstance(right, Num) and right.value == 0
    lo = isinstance(left, Num) and left.value == 1
    ro = isinstance(right, Num) and right.value == 1
    if op == "+":
        if lz:
            return right
        if rz:
            return left
    elif op == "-":
        if rz:
            return left
        if lz:
            return normalize(Unary("-", right))
    elif op == "*":
        if lz or rz:
            return Num(Fraction(0))
        if lo:
            return right
        if ro:
            return left
    elif op == "/":
        if ro:
            return left
    return Binary(op, left, right)


def subst(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions (simultaneously) and normalize."""
    if not mapping:
        return normalize(e)
    return normalize(_subst(e, mapping))


def _subst(e: Expr, mapping) -> Expr:
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, (Num, Bool)):
        return e
    if isinstance(e, Unary):
        return Unary(e.op, _subst(e.operand, mapping))
    return Binary(e.op, _subst(e.left, mapping), _subst(e.right, mapping))


@lru_cache(maxsize=200_000)
def variables(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, (Num, Bool)):
        return frozenset()
    if isinstance(e, Unary):
        return variables(e.operand)
    return variables(e.left) | variables(e.right)


def is_constant(e: Expr) -> bool:
    return isinstance(e, (Num, Bool))


def evaluate(e: Expr, env: Mapping[str, object] = None):
    """Exact evaluation (Fractions and bools).  Unknown variables raise KeyError."""
    env = env or {}
    if isinstance(e, (Num, Bool)):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Unary):
        v = evaluate(e.operand, env)
        return -v if e.op == "-" else (not v)
    if e.op == "&&":
        return bool(evaluate(e.left, env)) and bool(evaluate(e.right, env))
    if e.op == "||":
        return bool(evaluate(e.left, env)) or bool(evaluate(e.right, env))
    a = evaluate(e.left, env)
    b = evaluate(e.right, env)
    if e.op in CMP_OPS:
        return _fold_cmp(e.op, a, b)
    if e.op == "/" and b == 0:
        raise ZeroDivisionError("division by zero")
    return _fold_arith(e.op, a, b)


# ---------------------------------------------------------------------------
# negation and guard splitting

_COMPLEMENT = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}


def negate(e: Expr) -> Expr:
    """Negation pushed down to comparisons.

    ``!(a == b)`` becomes ``a < b || a > b`` so that guards stay within the
    comparison fragment accepted by reachability tools.
    """
    e = normalize(e)
    if isinstance(e, Bool):
        return Bool(not e.value)
    if isinstance(e, Unary) and e.op == "!":
        return e.operand
    if isinstance(e, Binary):
        if e.op in _COMPLEMENT:
            return Binary(_COMPLEMENT[e.op], e.left, e.right)
        if e.op == "==":
            return Binary("||", Binary("<", e.left, e.right), Binary(">", e.left, e.right))
        if e.op == "!=":
            return Binary("==", e.left, e.right)
        if e.op == "&&":
            return normalize(Binary("||", negate(e.left), negate(e.right)))
        if e.op == "||":
            return normalize(Binary("&&", negate(e.left), negate(e.right)))
    raise ValueError(f"cannot negate non-boolean expression {to_text(e)}")


def disjoint_cases(e: Expr) -> list:
    """Split a condition into pairwise-disjoint conjunctions of comparisons.

    Returns a list of cases, each a tuple of atoms.  The disjunction of the
    cases is equivalent to ``e`` and no valuation satisfies two cases.  An
    empty list means the condition is unsatisfiable; ``[()]`` means it is
    always true.
    """
    e = normalize(e)
    if isinstance(e, Bool):
        return [()] if e.value else []
    if isinstance(e, Unary) and e.op == "!":
        return disjoint_cases(negate(e.operand))
    if isinstance(e, Binary):
        if e.op == "&&":
            out = []
            for a in disjoint_cases(e.left):
                for b in disjoint_cases(e.right):
                    case = _merge_case(a, b)
                    if case is not None:
                        out.append(case)
            return out
        if e.op == "||":
            out = list(disjoint_cases(e.left))
            for a in disjoint_cases(negate(e.left)):
                for b in disjoint_cases(e.right):
                    case = _merge_case(a, b)
                    if case is not None:
                        out.append(case)
            return out
        if e.op == "!=":
            return [(Binary("<", e.left, e.right),), (Binary(">", e.left, e.right),)]
        if e.op in CMP_OPS:
            return [(e,)]
    raise ValueError(f"not a condition: {to_text(e)}")


def _merge_case(a: tuple, b: tuple):
    out = list(a)
    for atom in b:
        atom = normalize(atom)
        if isinstance(atom, Bool):
            if not atom.value:
                return None
            continue
        if atom not in out:
            out.append(atom)
    return tuple(out)


# ---------------------------------------------------------------------------
# linearity


def nonlinear_subterms(e: Expr) -> list:
    """Products of two variable-bearing terms and quotients by a variable."""
    out = []
    if isinstance(e, Unary):
        return nonlinear_subterms(e.operand)
    if isinstance(e, Binary):
        if e.op == "*" and variables(e.left) and variables(e.right):
            out.append(e)
        elif e.op == "/" and variables(e.right):
            out.append(e)
        out.extend(nonlinear_subterms(e.left))
        out.extend(nonlinear_subterms(e.right))
    return out


def is_nonlinear(e: Expr) -> bool:
    return bool(nonlinear_subterms(e))


# ---------------------------------------------------------------------------
# printing


def format_rational(q: Fraction) -> str:
    """Decimal without exponent when the expansion terminates, ``p/q`` otherwise."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    scaled = abs(q.numerator) * (10 ** digits) // q.denominator
    text = str(scaled).rjust(digits + 1, "0")
    text = f"{text[:-digits]}.{text[-digits:]}".rstrip("0")
    return ("-" if q < 0 else "") + text


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary):
        return _UNARY_PREC
    return _ATOM_PREC


def to_text(e: Expr, and_op: str = "&&", or_op: str = "||") -> str:
    """Render with the minimum parentheses needed to re-parse the same tree."""
    if isinstance(e, Num):
        text = format_rational(e.value)
        return f"({text})" if "/" in text else text
    if isinstance(e, Bool):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        inner = to_text(e.operand, and_op, or_op)
        if _prec(e.operand) < _UNARY_PREC or inner.startswith("-"):
            inner = f"({inner})"
        return f"{e.op}{inner}"
    p = _PREC[e.op]
    left = to_text(e.left, and_op, or_op)
    right = to_text(e.right, and_op, or_op)
    lp, rp = _prec(e.left), _prec(e.right)
    if lp < p or (p == 3 and lp == 3):
        left = f"({left})"
    if rp <= p:
        right = f"({right})"
    op = {"&&": and_op, "||": or_op}.get(e.op, e.op)
    if e.op in ("*", "/"):
        return f"{left}{op}{right}"
    return f"{left} {op} {right}"


def to_python(e: Expr, name_of: Callable[[str], str], tol: Optional[str] = None) -> str:
    """Python source for numerical evaluation.

    ``name_of`` maps a variable to a Python expression.  With ``tol`` set,
    ``==``/``!=`` compare within that tolerance name.
    """
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Bool):
        return "True" if e.value else "False"
    if isinstance(e, Var):
        return name_of(e.name)
    if isinstance(e, Unary):
        inner = to_python(e.operand, name_of, tol)
        return f"(-{inner})" if e.op == "-" else f"(not {inner})"
    a = to_python(e.left, name_of, tol)
    b = to_python(e.right, name_of, tol)
    if e.op == "&&":
        return f"({a} and {b})"
    if e.op == "||":
        return f"({a} or {b})"
    if e.op == "/":
        return f"_div({a}, {b})"
    if tol is not None and e.op == "==":
        return f"(abs({a} - {b}) <= {tol})"
    if tol is not None and e.op == "!=":
        return f"(abs({a} - {b}) > {tol})"
    return f"({a} {e.op} {b})"
