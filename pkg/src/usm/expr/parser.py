"""Recursive-descent parser for the integrand grammar.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := number | name | name '(' expr ')' | '(' expr ')'

Numbers are integers, decimals (read exactly) or ``p/q`` via division.
``pi`` and ``i`` are constants; there is no implicit multiplication and no
unary plus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from usm.expr.core import (
    FUNCTION_TAGS,
    I,
    PI,
    Constant,
    Expr,
    GaussianRational,
    ImaginaryUnit,
    Product,
    Sum,
    Variable,
    add,
    call,
    mul,
    pow_,
)

_ALIASES = {"log": "ln", "arcsin": "asin", "arccos": "acos", "arctan": "atan"}
_CALLABLE = FUNCTION_TAGS | {"sqrt", "abs"}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


def as_gaussian(e: Expr) -> GaussianRational:
    """Read a constant expression of the form ``p + q*i`` exactly."""
    if isinstance(e, Constant):
        return GaussianRational(e.value)
    if isinstance(e, ImaginaryUnit):
        return GaussianRational(0, 1)
    if isinstance(e, Product) and len(e.factors) == 2 and isinstance(e.factors[0], Constant) and isinstance(e.factors[1], ImaginaryUnit):
        return GaussianRational(0, e.factors[0].value)
    if isinstance(e, Sum):
        total = GaussianRational(0)
        for t in e.terms:
            total = total + as_gaussian(t)
        return total
    raise ValueError(f"{e} is not a Gaussian-rational constant")


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.k = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.k]

    def take(self) -> _Tok:
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, text: str):
        if self.tok.text != text:
            raise ParseError(f"expected {text!r}", self.tok.offset)
        self.take()

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.tok.text in ("+", "-"):
            op = self.take().text
            t = self.term()
            terms.append(t if op == "+" else mul(-1, t))
        return add(*terms)

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.take().text
            rhs = self.unary()
            if op == "*":
                e = mul(e, rhs)
            else:
                try:
                    e = mul(e, pow_(rhs, -1))
                except ZeroDivisionError:
                    raise ParseError("division by zero", self.toks[self.k - 1].offset) from None
        return e

    def unary(self) -> Expr:
        if self.tok.text == "-":
            self.take()
            return mul(-1, self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.text == "^":
            at = self.take().offset
            w_expr = self.unary()
            try:
                w = as_gaussian(w_expr)
            except ValueError:
                raise ParseError("exponent must be a rational or Gaussian-rational constant", at) from None
            try:
                return pow_(base, w)
            except ZeroDivisionError:
                raise ParseError("zero raised to a non-positive power", at) from None
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Constant(Fraction(t.text))
        if t.kind == "name":
            self.take()
            if self.tok.text == "(":
                name = _ALIASES.get(t.text, t.text)
                if name not in _CALLABLE:
                    raise ParseError(f"unknown function {t.text!r}", t.offset)
                self.take()
                arg = self.expr()
                self.expect(")")
                return call(name, arg)
            if t.text == "pi":
                return PI
            if t.text == "i":
                return I
            return Variable(t.text)
        if t.text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.offset)
        raise ParseError(f"unexpected {t.text!r}", t.offset)


def parse(text: str) -> Expr:
    """Parse ``text`` into a normalized expression."""
    return _Parser(text).parse()
