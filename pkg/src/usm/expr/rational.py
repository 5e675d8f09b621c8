"""Conversion between expressions and exact rational functions."""

from __future__ import annotations

from fractions import Fraction

from usm.expr.core import (
    Constant,
    Expr,
    Power,
    Product,
    Sum,
    Variable,
    add,
    mul,
    pow_,
)
from usm.poly import Poly, RationalFunction, squarefree


class NotRational(ValueError):
    """The expression is not a rational function of the variable over Q."""


def to_rational_function(e: Expr, name: str, memo: dict | None = None) -> RationalFunction:
    memo = {} if memo is None else memo

    def go(node: Expr) -> RationalFunction:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Constant):
            out = RationalFunction.const(node.value)
        elif isinstance(node, Variable):
            if node.name != name:
                raise NotRational(f"foreign symbol {node.name}")
            out = RationalFunction.x()
        elif isinstance(node, Sum):
            out = RationalFunction.const(0)
            for t in node.terms:
                out = out + go(t)
        elif isinstance(node, Product):
            out = RationalFunction.const(1)
            for f in node.factors:
                out = out * go(f)
        elif isinstance(node, Power) and node.exponent.is_integer:
            try:
                out = go(node.base) ** int(node.exponent.re)
            except ZeroDivisionError:
                raise NotRational("power of zero") from None
        else:
            raise NotRational(f"{node} is not rational in {name}")
        memo[node] = out
        return out

    return go(e)


def poly_to_expr(p: Poly, x: Expr) -> Expr:
    return add(*(mul(Constant(c), pow_(x, k)) for k, c in enumerate(p.c) if c))


def laurent_to_expr(coeffs: dict[int, Fraction], x: Expr) -> Expr:
    return add(*(mul(Constant(c), pow_(x, k)) for k, c in sorted(coeffs.items()) if c))


def rational_to_expr(f: RationalFunction, x: Expr) -> Expr:
    """Canonical expression: Laurent polynomial when the denominator is a
    monomial, otherwise expanded numerator over square-free factors."""
    if f.den.is_one():
        return poly_to_expr(f.num, x)
    if f.den.is_monomial():
        k = f.den.deg
        return laurent_to_expr({i - k: c for i, c in enumerate(f.num.c) if c}, x)
    parts = [poly_to_expr(f.num, x)]
    for a, m in squarefree(f.den):
        parts.append(pow_(poly_to_expr(a, x), -m))
    return mul(*parts)


def is_rational_in(e: Expr, name: str) -> bool:
    try:
        to_rational_function(e, name)
    except NotRational:
        return False
    return True
