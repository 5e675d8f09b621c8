"""Symbolic differentiation."""

from __future__ import annotations

from fractions import Fraction

from usm.expr.core import (
    AbsoluteValue,
    Call,
    Constant,
    Expr,
    Power,
    Product,
    Sum,
    Variable,
    ONE,
    ZERO,
    add,
    call,
    free_symbols,
    mul,
    pow_,
)


class UnsupportedDerivative(ValueError):
    pass


def _chain(tag: str, u: Expr) -> Expr:
    """d/du of ``tag(u)``."""
    h = Fraction(1, 2)
    if tag == "exp":
        return call("exp", u)
    if tag == "sin":
        return call("cos", u)
    if tag == "cos":
        return mul(-1, call("sin", u))
    if tag == "tan":
        return pow_(call("sec", u), 2)
    if tag == "sec":
        return mul(call("sec", u), call("tan", u))
    if tag == "csc":
        return mul(-1, call("cos", u), pow_(call("sin", u), -2))
    if tag == "asin":
        return pow_(add(1, mul(-1, pow_(u, 2))), -h)
    if tag == "acos":
        return mul(-1, pow_(add(1, mul(-1, pow_(u, 2))), -h))
    if tag == "atan":
        return pow_(add(1, pow_(u, 2)), -1)
    if tag == "asec":
        # asec u = acos(1/u)
        return mul(pow_(u, -2), pow_(add(1, mul(-1, pow_(u, -2))), -h))
    if tag == "acsc":
        return mul(-1, pow_(u, -2), pow_(add(1, mul(-1, pow_(u, -2))), -h))
    if tag == "asinh":
        return pow_(add(pow_(u, 2), 1), -h)
    if tag == "sinh":
        return call("cosh", u)
    if tag == "cosh":
        return call("sinh", u)
    if tag == "tanh":
        return add(1, mul(-1, pow_(call("tanh", u), 2)))
    raise UnsupportedDerivative(f"no rule for {tag}")


def differentiate(e: Expr, name: str) -> Expr:
    """Normalized derivative of ``e`` with respect to the variable ``name``."""
    cache: dict[Expr, Expr] = {}

    def d(node: Expr) -> Expr:
        if node in cache:
            return cache[node]
        if name not in free_symbols(node):
            out = ZERO
        elif isinstance(node, Variable):
            out = ONE
        elif isinstance(node, Sum):
            out = add(*(d(t) for t in node.terms))
        elif isinstance(node, Product):
            fs = node.factors
            out = add(*(mul(*fs[:k], d(fs[k]), *fs[k + 1 :]) for k in range(len(fs))))
        elif isinstance(node, Power):
            w = node.exponent
            out = mul(Constant(w.re) if w.is_real else _gauss(w), pow_(node.base, w - 1), d(node.base))
        elif isinstance(node, Call):
            u = node.arg
            if node.tag == "ln":
                inner = u.arg if isinstance(u, AbsoluteValue) else u
                out = mul(d(inner), pow_(inner, -1))
            else:
                out = mul(_chain(node.tag, u), d(u))
        elif isinstance(node, AbsoluteValue):
            raise UnsupportedDerivative("derivative of abs() outside ln() is sign-dependent")
        else:
            out = ZERO
        cache[node] = out
        return out

    return d(e)


def _gauss(w) -> Expr:
    from usm.expr.core import I

    return add(Constant(w.re), mul(Constant(w.im), I))
