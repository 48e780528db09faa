"""Observational propositions: abstract syntax, a recursive-descent parser and a printer.

Grammar (whitespace between tokens is ignored)::

    prop     = or_expr ;
    or_expr  = and_expr { "|" and_expr } ;
    and_expr = unary { "&" unary } ;
    unary    = "!" unary | "(" prop ")" | atom ;
    atom     = IDENT "<=" NUM | IDENT "=" NUM
             | IDENT "in" "(" NUM "," NUM "]"
             | "eq" "(" IDENT "," IDENT ")"
             | "joint" "(" IDENT "," IDENT { "," IDENT } ")" ;
    IDENT    = letter { letter | digit | "_" } ;
    NUM      = ["-"] digits ["." digits] ;
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Mapping, Union

import numpy as np

from .errors import PropositionSyntaxError, UnknownObservable
from .linalg import get_policy, max_norm

__all__ = [
    "Leq",
    "EqConst",
    "InInterval",
    "EqObs",
    "Joint",
    "Not",
    "And",
    "Or",
    "Proposition",
    "parse",
    "to_text",
    "names_in",
    "atoms_in",
    "is_standard",
]


@dataclass(frozen=True)
class Leq:
    name: str
    value: float


@dataclass(frozen=True)
class EqConst:
    name: str
    value: float


@dataclass(frozen=True)
class InInterval:
    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"empty interval ({self.lower}, {self.upper}]")


@dataclass(frozen=True)
class EqObs:
    left: str
    right: str


@dataclass(frozen=True)
class Joint:
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) < 2:
            raise ValueError("joint(...) needs at least two observables")


@dataclass(frozen=True)
class Not:
    child: "Proposition"


@dataclass(frozen=True)
class And:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Or:
    left: "Proposition"
    right: "Proposition"


Atom = Union[Leq, EqConst, InInterval, EqObs, Joint]
Proposition = Union[Atom, Not, And, Or]
ATOM_TYPES = (Leq, EqConst, InInterval, EqObs, Joint)


# -- tokenizer ---------------------------------------------------------------

_PUNCT = {"(", ")", ",", "]", "!", "&", "|", "="}


@dataclass
class _Token:
    kind: str  # "ident", "num", "op", "eof"
    text: str
    pos: int  # character offset


def _is_letter(c: str) -> bool:
    return c.isascii() and c.isalpha()


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif _is_letter(c):
            j = i + 1
            while j < n and (_is_letter(text[j]) or text[j].isascii() and text[j].isdigit() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
        elif c == "-" or (c.isascii() and c.isdigit()):
            j = i + 1 if c == "-" else i
            start_digits = j
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            if j == start_digits:
                raise _error(text, "expected digits after '-'", j)
            if j < n and text[j] == ".":
                j += 1
                frac = j
                while j < n and text[j].isascii() and text[j].isdigit():
                    j += 1
                if j == frac:
                    raise _error(text, "expected digits after '.'", j)
            tokens.append(_Token("num", text[i:j], i))
            i = j
        elif text.startswith("<=", i):
            tokens.append(_Token("op", "<=", i))
            i += 2
        elif c in _PUNCT:
            tokens.append(_Token("op", c, i))
            i += 1
        else:
            raise _error(text, f"unexpected character {c!r}", i)
    tokens.append(_Token("eof", "", n))
    return tokens


def _error(text: str, message: str, char_pos: int) -> PropositionSyntaxError:
    return PropositionSyntaxError(message, len(text[:char_pos].encode("utf-8")))


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, message: str, tok: _Token | None = None):
        t = tok or self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise _error(self.text, f"{message}, found {found}", t.pos)

    def expect_op(self, op: str) -> _Token:
        if self.tok.kind != "op" or self.tok.text != op:
            self.fail(f"expected {op!r}")
        return self.advance()

    def expect_ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail("expected an observable name")
        return self.advance().text

    def expect_num(self) -> float:
        if self.tok.kind != "num":
            self.fail("expected a number")
        return float(self.advance().text)

    def parse(self) -> Proposition:
        node = self.or_expr()
        if self.tok.kind != "eof":
            self.fail("expected '&', '|' or end of input")
        return node

    def _operand_after(self, op: _Token, sub):
        if self.tok.kind == "eof":
            raise _error(self.text, f"dangling {op.text!r} with no right operand", op.pos)
        return sub()

    def or_expr(self) -> Proposition:
        left = self.and_expr()
        while self.tok.kind == "op" and self.tok.text == "|":
            op = self.advance()
            left = Or(left, self._operand_after(op, self.and_expr))
        return left

    def and_expr(self) -> Proposition:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text == "&":
            op = self.advance()
            left = And(left, self._operand_after(op, self.unary))
        return left

    def unary(self) -> Proposition:
        t = self.tok
        if t.kind == "op" and t.text == "!":
            self.advance()
            return Not(self._operand_after(t, self.unary))
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.or_expr()
            self.expect_op(")")
            return node
        if t.kind == "ident":
            return self.atom()
        self.fail("expected a proposition")

    def atom(self) -> Atom:
        name_tok = self.advance()
        name = name_tok.text
        nxt = self.tok
        if name in ("eq", "joint") and nxt.kind == "op" and nxt.text == "(":
            self.advance()
            names = [self.expect_ident()]
            while self.tok.kind == "op" and self.tok.text == ",":
                self.advance()
                names.append(self.expect_ident())
            close = self.expect_op(")")
            if name == "eq":
                if len(names) != 2:
                    raise _error(self.text, "eq(...) takes exactly two observables", name_tok.pos)
                return EqObs(names[0], names[1])
            if len(names) < 2:
                raise _error(self.text, "joint(...) needs at least two observables", close.pos)
            return Joint(tuple(names))
        if nxt.kind == "op" and nxt.text == "<=":
            self.advance()
            return Leq(name, self.expect_num())
        if nxt.kind == "op" and nxt.text == "=":
            self.advance()
            return EqConst(name, self.expect_num())
        if nxt.kind == "ident" and nxt.text == "in":
            self.advance()
            open_tok = self.expect_op("(")
            a = self.expect_num()
            self.expect_op(",")
            b = self.expect_num()
            self.expect_op("]")
            if not a < b:
                raise _error(self.text, f"empty interval ({a:g}, {b:g}]", open_tok.pos)
            return InInterval(name, a, b)
        self.fail(f"expected '<=', '=' or 'in' after {name!r}")


def parse(text: str) -> Proposition:
    """Parse proposition text into an AST.

    Raises
    ------
    PropositionSyntaxError
        With ``position`` set to the byte offset of the offending token.
    """
    return _Parser(text).parse()


# -- printing ----------------------------------------------------------------


def _num(v: float) -> str:
    s = format(Decimal(repr(float(v))), "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


_PREC = {Or: 1, And: 2, Not: 3}


def _prec(node) -> int:
    return _PREC.get(type(node), 4)


def to_text(node: Proposition) -> str:
    """Canonical text form; ``parse(to_text(ast)) == ast``."""
    if isinstance(node, Leq):
        return f"{node.name} <= {_num(node.value)}"
    if isinstance(node, EqConst):
        return f"{node.name} = {_num(node.value)}"
    if isinstance(node, InInterval):
        return f"{node.name} in ({_num(node.lower)}, {_num(node.upper)}]"
    if isinstance(node, EqObs):
        return f"eq({node.left}, {node.right})"
    if isinstance(node, Joint):
        return f"joint({', '.join(node.names)})"
    if isinstance(node, Not):
        inner = to_text(node.child)
        return f"!{inner}" if _prec(node.child) >= 3 else f"!({inner})"
    if isinstance(node, (And, Or)):
        p = _prec(node)
        sym = "&" if isinstance(node, And) else "|"
        left = to_text(node.left)
        right = to_text(node.right)
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
        return f"{left} {sym} {right}"
    raise TypeError(f"not a proposition node: {node!r}")


# -- queries -----------------------------------------------------------------


def atoms_in(node: Proposition) -> list[Atom]:
    """Distinct atoms, in first-occurrence order."""
    out: list[Atom] = []

    def walk(n):
        if isinstance(n, ATOM_TYPES):
            if n not in out:
                out.append(n)
        elif isinstance(n, Not):
            walk(n.child)
        elif isinstance(n, (And, Or)):
            walk(n.left)
            walk(n.right)
        else:
            raise TypeError(f"not a proposition node: {n!r}")

    walk(node)
    return out


def _atom_names(a: Atom) -> tuple[str, ...]:
    if isinstance(a, EqObs):
        return (a.left, a.right)
    if isinstance(a, Joint):
        return a.names
    return (a.name,)


def names_in(node: Proposition) -> set[str]:
    return {name for a in atoms_in(node) for name in _atom_names(a)}


def ordered_names(node: Proposition) -> list[str]:
    out: list[str] = []
    for a in atoms_in(node):
        for name in _atom_names(a):
            if name not in out:
                out.append(name)
    return out


def is_standard(node: Proposition, model: Mapping) -> bool:
    """True iff no extended atoms occur and all referenced observables commute."""
    names = ordered_names(node)
    mats = []
    for name in names:
        if name not in model:
            raise UnknownObservable(name)
        x = model[name]
        mats.append(np.asarray(getattr(x, "matrix", x), dtype=complex))
    if any(isinstance(a, (EqObs, Joint)) for a in atoms_in(node)):
        return False
    tol = get_policy().op_eq
    return all(
        max_norm(a @ b - b @ a) <= tol
        for i, a in enumerate(mats)
        for b in mats[i + 1:]
    )
