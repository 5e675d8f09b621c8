"""Canonical infix printer.

The output is valid input for :func:`usm.expr.parser.parse` and re-parses to
the identical normalized tree.
"""

from __future__ import annotations

from fractions import Fraction

from usm.expr.core import (
    AbsoluteValue,
    Call,
    Constant,
    Expr,
    GaussianRational,
    ImaginaryUnit,
    Pi,
    Power,
    Product,
    Sum,
    Variable,
)

_SUM, _PRODUCT, _UNARY, _POWER, _ATOM = range(5)


def _fraction(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _gaussian(w: GaussianRational) -> str:
    if w.im == 0:
        return _fraction(w.re)
    if w.im == 1:
        im = "i"
    elif w.im == -1:
        im = "-i"
    else:
        im = f"{_fraction(w.im)}*i"
    if w.re == 0:
        return im
    if im.startswith("-"):
        return f"{_fraction(w.re)} - {im[1:]}"
    return f"{_fraction(w.re)} + {im}"


def _is_negative(e: Expr) -> bool:
    if isinstance(e, Constant):
        return e.value < 0
    if isinstance(e, Product) and isinstance(e.factors[0], Constant):
        return e.factors[0].value < 0
    return False


def _negate(e: Expr) -> Expr:
    from usm.expr.core import NEG_ONE, mul

    return mul(NEG_ONE, e)


def _prec(e: Expr) -> int:
    if isinstance(e, Sum):
        return _SUM
    if isinstance(e, Product):
        return _UNARY if _is_negative(e) else _PRODUCT
    if isinstance(e, Constant):
        if e.value < 0:
            return _UNARY
        return _ATOM if e.value.denominator == 1 else _PRODUCT
    if isinstance(e, Power):
        if e.exponent == Fraction(1, 2):
            return _ATOM
        if e.exponent.is_real and e.exponent.re < 0:
            return _PRODUCT
        return _POWER
    return _ATOM


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_string(e)
    return f"({s})" if _prec(e) < min_prec else s


def _power(e: Power) -> str:
    w = e.exponent
    if w == Fraction(1, 2):
        return f"sqrt({to_string(e.base)})"
    if w.is_real and w.re < 0:
        return "1/" + _denominator_factor(e)
    base = _wrap(e.base, _ATOM)
    if w.is_integer and w.re >= 0:
        return f"{base}^{w.re}"
    return f"{base}^({_gaussian(w)})"


def _denominator_factor(e: Power) -> str:
    # printed form of base^(-w) for a factor with real negative exponent
    w = -e.exponent
    if w == 1:
        return _wrap(e.base, _ATOM)
    if w == Fraction(1, 2):
        return f"sqrt({to_string(e.base)})"
    base = _wrap(e.base, _ATOM)
    if w.is_integer:
        return f"{base}^{w.re}"
    return f"{base}^({_gaussian(w)})"


def _product(e: Product) -> str:
    factors = list(e.factors)
    coeff = Fraction(1)
    if isinstance(factors[0], Constant):
        coeff = factors.pop(0).value
    sign = ""
    if coeff < 0:
        sign, coeff = "-", -coeff
    num: list[str] = []
    den: list[str] = []
    if coeff.numerator != 1:
        num.append(str(coeff.numerator))
    if coeff.denominator != 1:
        den.append(str(coeff.denominator))
    for f in factors:
        if isinstance(f, Power) and f.exponent.is_real and f.exponent.re < 0:
            den.append(_denominator_factor(f))
        else:
            num.append(_wrap(f, _POWER if not isinstance(f, Power) else _POWER))
    top = "*".join(num) if num else "1"
    if not den:
        return sign + top
    bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
    if len(num) > 1:
        top = "*".join(num)
    return f"{sign}{top}/{bottom}"


def _sum(e: Sum) -> str:
    parts: list[str] = []
    for k, t in enumerate(e.terms):
        if k == 0:
            parts.append(to_string(t))
        elif _is_negative(t):
            parts.append(" - " + _wrap(_negate(t), _PRODUCT))
        else:
            parts.append(" + " + _wrap(t, _PRODUCT))
    return "".join(parts)


def to_string(e: Expr) -> str:
    if isinstance(e, Constant):
        return _fraction(e.value)
    if isinstance(e, ImaginaryUnit):
        return "i"
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Variable):
        return e.name
    if isinstance(e, Sum):
        return _sum(e)
    if isinstance(e, Product):
        return _product(e)
    if isinstance(e, Power):
        return _power(e)
    if isinstance(e, Call):
        return f"{e.tag}({to_string(e.arg)})"
    if isinstance(e, AbsoluteValue):
        return f"abs({to_string(e.arg)})"
    raise TypeError(f"unprintable node {type(e).__name__}")
