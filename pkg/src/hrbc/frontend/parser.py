"""Recursive-descent parser producing :class:`~hrbc.frontend.ast.Model`."""

from __future__ import annotations

from fractions import Fraction

from ..diagnostics import DiagnosticError, Span, error
from ..expr import Binary, Bool, Num, Unary, Var
from . import ast
from .lexer import PUNCT_TEXT, Token, tokenize

_CMP = {"Lt": "<", "Le": "<=", "Gt": ">", "Ge": ">=", "EqEq": "==", "Ne": "!="}
_TYPES = ("KW_int", "KW_real", "KW_float")


def _describe(kind: str) -> str:
    if kind.startswith("KW_"):
        return f"'{kind[3:]}'"
    if kind in PUNCT_TEXT:
        return f"'{PUNCT_TEXT[kind]}'"
    return {"Ident": "identifier", "Num": "number", "EOF": "end of input"}.get(kind, kind)


class Parser:
    def __init__(self, tokens: list, filename: str = "<input>"):
        self.tokens = list(tokens)
        last = self.tokens[-1].span if self.tokens else Span(filename, 1, 1)
        self.tokens.append(Token("EOF", "", last))
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *kinds) -> bool:
        return self.tok.kind in kinds

    def accept(self, kind):
        if self.tok.kind == kind:
            tok = self.tok
            self.pos += 1
            return tok
        return None

    def expect(self, *kinds) -> Token:
        if self.tok.kind in kinds:
            tok = self.tok
            self.pos += 1
            return tok
        self.fail(kinds)

    def fail(self, expected):
        found = self.tok
        what = _describe(found.kind) if found.kind == "EOF" else repr(found.text)
        wanted = ", ".join(sorted(_describe(k) for k in expected))
        raise DiagnosticError([error(f"syntax error: expected {wanted}; found {what}", found.span)])

    def ident(self) -> Token:
        return self.expect("Ident")

    # -- model --------------------------------------------------------------

    def model(self) -> ast.Model:
        consts, classes = [], []
        while not self.at("KW_main", "EOF"):
            if self.at("KW_const"):
                consts.append(self.const_decl())
            elif self.at("KW_softwareclass", "KW_physicalclass"):
                classes.append(self.class_decl())
            else:
                self.fail(("KW_const", "KW_softwareclass", "KW_physicalclass")
                          + (() if not classes else ("KW_main",)))
        if not classes:
            self.fail(("KW_softwareclass", "KW_physicalclass"))
        instances, can = self.main()
        self.expect("EOF")
        return ast.Model(tuple(consts), tuple(classes), tuple(instances), can)

    def const_decl(self) -> ast.ConstDecl:
        start = self.expect("KW_const")
        name = self.ident().text
        self.expect("Eq")
        value = self.literal()
        self.expect("Semi")
        return ast.ConstDecl(name, value, start.span)

    def literal(self) -> Fraction:
        neg = self.accept("Minus") is not None
        value = self.expect("Num").value
        return -value if neg else value

    def class_decl(self) -> ast.ClassDecl:
        start = self.expect("KW_softwareclass", "KW_physicalclass")
        kind = "software" if start.kind == "KW_softwareclass" else "physical"
        name = self.ident().text
        self.expect("LBrace")
        known, state_vars, msgsrvs, modes = [], [], [], []
        if self.accept("KW_knownrebecs"):
            self.expect("LBrace")
            while not self.accept("RBrace"):
                cls = self.ident().text
                names = [self.ident()]
                while self.accept("Comma"):
                    names.append(self.ident())
                self.expect("Semi")
                known.extend(ast.KnownRebec(cls, t.text, t.span) for t in names)
        if self.accept("KW_statevars"):
            self.expect("LBrace")
            while not self.accept("RBrace"):
                typ = self.expect(*_TYPES).text
                names = [self.ident()]
                while self.accept("Comma"):
                    names.append(self.ident())
                self.expect("Semi")
                state_vars.extend(ast.VarDecl(t.text, typ, t.span) for t in names)
        while not self.accept("RBrace"):
            if self.at("KW_msgsrv"):
                msgsrvs.append(self.msgsrv())
            elif self.at("KW_mode"):
                modes.append(self.mode())
            else:
                self.fail(("KW_msgsrv", "KW_mode", "RBrace"))
        return ast.ClassDecl(kind, name, tuple(known), tuple(state_vars),
                             tuple(msgsrvs), tuple(modes), start.span)

    def msgsrv(self) -> ast.MsgSrv:
        start = self.expect("KW_msgsrv")
        name = self.ident().text
        self.expect("LParen")
        params = []
        if not self.at("RParen"):
            while True:
                typ = self.expect(*_TYPES).text
                tok = self.ident()
                params.append(ast.Param(typ, tok.text, tok.span))
                if not self.accept("Comma"):
                    break
        self.expect("RParen")
        body = self.block()
        return ast.MsgSrv(name, tuple(params), body, start.span)

    def mode(self) -> ast.Mode:
        start = self.expect("KW_mode")
        name = self.ident().text
        self.expect("LBrace")
        self.expect("KW_inv")
        self.expect("LParen")
        inv = self.expr()
        self.expect("RParen")
        flows = []
        while self.at("Ident"):
            tok = self.ident()
            self.expect("Prime")
            self.expect("Eq")
            flows.append(ast.Flow(tok.text, self.expr(), tok.span))
            self.accept("Semi")
        if not flows:
            self.fail(("Ident",))
        self.expect("KW_guard")
        self.expect("LParen")
        guard = self.expr()
        self.expect("RParen")
        actions = self.mst()
        self.expect("RBrace")
        return ast.Mode(name, inv, tuple(flows), guard, actions, start.span)

    # -- statements ---------------------------------------------------------

    def block(self) -> tuple:
        self.expect("LBrace")
        stmts = []
        while not self.accept("RBrace"):
            stmts.append(self.statement())
        return tuple(stmts)

    def mst(self) -> tuple:
        if self.at("LBrace"):
            return self.block()
        return (self.statement(),)

    def statement(self):
        tok = self.tok
        if self.accept("KW_if"):
            self.expect("LParen")
            cond = self.expr()
            self.expect("RParen")
            then = self.mst()
            orelse = self.mst() if self.accept("KW_else") else None
            return ast.If(cond, then, orelse, tok.span)
        if self.accept("KW_delay"):
            self.expect("LParen")
            amount = self.expr()
            self.expect("RParen")
            self.expect("Semi")
            return ast.Delay(amount, tok.span)
        if self.accept("KW_setmode"):
            self.expect("LParen")
            mode = self.ident().text
            self.expect("RParen")
            self.expect("Semi")
            return ast.SetModeLocal(mode, tok.span)
        if self.at("KW_self") or (self.at("Ident") and self.peek().kind == "Dot"):
            target = self.expect("KW_self", "Ident").text
            self.expect("Dot")
            msg = self.ident().text
            self.expect("LParen")
            if msg == "setMode":
                mode = self.ident().text
                self.expect("RParen")
                self.expect("Semi")
                return ast.SendSetMode(target, mode, tok.span)
            args = []
            if not self.at("RParen"):
                args.append(self.expr())
                while self.accept("Comma"):
                    args.append(self.expr())
            self.expect("RParen")
            self.expect("Semi")
            return ast.Send(target, msg, tuple(args), tok.span)
        if self.at("Ident"):
            name = self.ident().text
            self.expect("Eq")
            value = self.expr()
            self.expect("Semi")
            return ast.Assign(name, value, tok.span)
        self.fail(("KW_if", "KW_delay", "KW_setmode", "KW_self", "Ident"))

    # -- main block ---------------------------------------------------------

    def main(self):
        self.expect("KW_main")
        self.expect("LBrace")
        instances = []
        while self.at("Ident"):
            instances.append(self.instance())
        can = self.can_spec() if self.at("KW_CAN") else None
        self.expect("RBrace")
        return instances, can

    def instance(self) -> ast.InstanceDecl:
        start = self.tok
        cls = self.ident().text
        name = self.ident().text
        self.expect("LParen")
        bindings = []
        if not self.at("RParen"):
            while True:
                at = self.expect("At")
                conn = self.expect("Ident", "KW_CAN")
                if conn.text not in ("Wire", "CAN"):
                    raise DiagnosticError([error(
                        f"unknown connection type '@{conn.text}' (expected @Wire or @CAN)", conn.span)])
                target = self.ident().text
                bindings.append(ast.Binding(conn.text, target, at.span))
                if not self.accept("Comma"):
                    break
        self.expect("RParen")
        self.expect("Colon")
        self.expect("LParen")
        args = []
        if not self.at("RParen"):
            args.append(self.literal())
            while self.accept("Comma"):
                args.append(self.literal())
        self.expect("RParen")
        self.expect("Semi")
        return ast.InstanceDecl(cls, name, tuple(bindings), tuple(args), start.span)

    def can_spec(self) -> ast.CanSpec:
        start = self.expect("KW_CAN")
        self.expect("LBrace")
        self.expect("KW_priorities")
        priorities = self.can_entries()
        self.expect("KW_delays")
        delays = self.can_entries()
        self.expect("RBrace")
        return ast.CanSpec(priorities, delays, start.span)

    def can_entries(self) -> tuple:
        self.expect("LBrace")
        entries = []
        while not self.accept("RBrace"):
            sender = self.ident()
            receiver = self.ident().text
            self.expect("Dot")
            msg = self.ident().text
            self.accept("Arrow")
            value = self.expect("Num").value
            self.expect("Semi")
            entries.append(ast.CanEntry(sender.text, receiver, msg, value, sender.span))
        return tuple(entries)

    # -- expressions --------------------------------------------------------

    def expr(self):
        left = self.conjunction()
        while self.at("OrOr"):
            tok = self.expect("OrOr")
            left = Binary("||", left, self.conjunction(), tok.span)
        return left

    def conjunction(self):
        left = self.comparison()
        while self.at("AndAnd"):
            tok = self.expect("AndAnd")
            left = Binary("&&", left, self.comparison(), tok.span)
        return left

    def comparison(self):
        left = self.additive()
        if self.tok.kind in _CMP:
            tok = self.tok
            self.pos += 1
            left = Binary(_CMP[tok.kind], left, self.additive(), tok.span)
        return left

    def additive(self):
        left = self.multiplicative()
        while self.at("Plus", "Minus"):
            tok = self.tok
            self.pos += 1
            left = Binary(tok.text, left, self.multiplicative(), tok.span)
        return left

    def multiplicative(self):
        left = self.unary()
        while self.at("Star", "Slash"):
            tok = self.tok
            self.pos += 1
            left = Binary(tok.text, left, self.unary(), tok.span)
        return left

    def unary(self):
        tok = self.tok
        if self.accept("Minus"):
            operand = self.unary()
            if isinstance(operand, Num):
                return Num(-operand.value, tok.span)
            return Unary("-", operand, tok.span)
        if self.accept("Bang"):
            return Unary("!", self.unary(), tok.span)
        return self.primary()

    def primary(self):
        tok = self.tok
        if self.accept("Num"):
            return Num(tok.value, tok.span)
        if self.accept("KW_true"):
            return Bool(True, tok.span)
        if self.accept("KW_false"):
            return Bool(False, tok.span)
        if self.accept("Ident"):
            return Var(tok.text, tok.span)
        if self.accept("LParen"):
            inner = self.expr()
            self.expect("RParen")
            return inner
        self.fail(("Num", "Ident", "LParen", "Minus", "Bang", "KW_true", "KW_false"))


def parse(tokens: list, filename: str = "<input>") -> ast.Model:
    """Build a model tree from a token list produced by :func:`tokenize`."""
    return Parser(tokens, filename).model()


def parse_source(source: str, filename: str = "<input>") -> ast.Model:
    return parse(tokenize(source, filename), filename)


def parse_expr(text: str, filename: str = "<expr>"):
    """Parse a standalone expression (guards, flows, forbidden predicates)."""
    p = Parser(tokenize(text, filename), filename)
    e = p.expr()
    p.expect("EOF")
    return e
