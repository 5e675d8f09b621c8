"""Back-substitution from the transform parameter to ``x``.

Reciprocal pairs ``c*(t^n - t^-n)`` are collapsed in parameter space before
the parameter is replaced, using

    D_n(y) = -2 * sum_j C(n, 2j+1) * y^(n-2j-1) * (y^2 - 1)^j * sqrt(y^2 - 1)

with ``t^n - t^-n = sigma * D_n(y)``, ``sigma = +1`` for ``y >= 1`` and
``-1`` for ``y <= -1``.  The circular parameter gets the analogous
``r^n - r^-n = ((1-W)^n - (1+W)^n) / Y^n`` with ``W = sqrt(1 - Y^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from usm.expr import (
    I,
    ONE,
    ZERO,
    Constant,
    Expr,
    Interval,
    Power,
    Product,
    Sum,
    Variable,
    abs_,
    add,
    call,
    eval_complex,
    free_symbols,
    ln,
    mul,
    pow_,
    simplify,
    sqrt,
    substitute,
)
from usm.expr.evaluate import NonRealError, PoleError
from usm.expr.simplify import _distribute
from usm.expr.rational import NotRational, to_rational_function
from usm.ratint import (
    ChainTerm,
    LogAbsTerm,
    ParamAntiderivative,
    PowerTerm,
    RationalTerm,
)
from usm.transforms import Branch, SubstitutionMap


_EVAL_ERRORS = (ZeroDivisionError, ValueError, OverflowError, PoleError, NonRealError)


@dataclass
class Antiderivative:
    """Piecewise antiderivative; each piece is valid up to its own constant."""

    pieces: list[tuple[Interval, Expr]]
    variable: str = "x"

    def piece_for(self, x: float) -> Optional[Expr]:
        for iv, e in self.pieces:
            if iv.lo <= x <= iv.hi:
                return e
        return None

    def __str__(self) -> str:
        return "; ".join(f"{iv}: {e}" for iv, e in self.pieces)


# --------------------------------------------------------------------------
# binomial difference


def binomial_difference(n: int, y: Expr, radical: Optional[Expr] = None, radicand: Optional[Expr] = None) -> Expr:
    """``D_n(y) = (y - w)^n - (y + w)^n`` with ``w = sqrt(y^2 - 1)``.

    ``radical`` and ``radicand`` may supply ``w`` and ``w^2`` in another
    normalization, e.g. ``sqrt((x+b)^2 - a^2)/a`` and ``y^2 - 1``.
    """
    if n < 1:
        raise ValueError("binomial difference needs n >= 1")
    y = Variable(y) if isinstance(y, str) else y
    if radicand is None:
        radicand = simplify(add(pow_(y, 2), -1))
    if radical is None:
        radical = sqrt(radicand)
    poly = add(*(mul(comb(n, 2 * j + 1), pow_(y, n - 2 * j - 1), pow_(radicand, j)) for j in range((n - 1) // 2 + 1)))
    return mul(-2, simplify(poly), radical)


def _circular_difference(n: int, Y: Expr, W: Expr, Wsq: Expr) -> Expr:
    # (1 - W)^n - (1 + W)^n = -2 * sum_{k odd} C(n, k) W^k
    poly = add(*(mul(comb(n, 2 * j + 1), pow_(Wsq, j)) for j in range((n - 1) // 2 + 1)))
    return mul(-2, simplify(poly), W, pow_(Y, -n))


def _power_split(term: Expr, param: str) -> Optional[tuple[Expr, int]]:
    p = Variable(param)
    factors = term.factors if isinstance(term, Product) else (term,)
    rest, n = [], None
    for f in factors:
        if f == p:
            k = 1
        elif isinstance(f, Power) and f.base == p and f.exponent.is_integer:
            k = int(f.exponent.re)
        else:
            if param in free_symbols(f):
                return None
            rest.append(f)
            continue
        if n is not None:
            return None
        n = k
    if n is None:
        return None
    return mul(*rest), n


def _flatten(e: Expr) -> Expr:
    # expand products of sums so reciprocal pairs sit side by side
    if isinstance(e, Product):
        d = _distribute(e, force=True)
        return d if d is e else _flatten(d)
    if isinstance(e, Sum):
        return add(*(_flatten(t) for t in e.terms))
    return e


def _collapse(e: Expr, param: str, replace) -> Expr:
    e = _flatten(e)
    terms = list(e.terms) if isinstance(e, Sum) else [e]
    powers: dict[int, tuple[int, Expr]] = {}
    for idx, t in enumerate(terms):
        hit = _power_split(t, param)
        if hit is not None and hit[1] != 0:
            powers[hit[1]] = (idx, hit[0])
    used: set[int] = set()
    out = []
    for n in sorted(k for k in powers if k > 0):
        if -n not in powers:
            continue
        (i, c), (j, c2) = powers[n], powers[-n]
        if simplify(add(c, c2)) == ZERO:
            out.append(mul(c, replace(n)))
            used.update((i, j))
    out.extend(t for idx, t in enumerate(terms) if idx not in used)
    return add(*out)


def collapse_reciprocal_powers(
    e: Expr,
    param: str,
    branch: Branch,
    y: Expr,
    radical: Optional[Expr] = None,
    radicand: Optional[Expr] = None,
) -> Expr:
    """Replace each exact pair ``c*(p^n - p^-n)`` by ``c*sigma*D_n(y)``."""
    sigma = 1 if branch is Branch.UPPER else -1
    return _collapse(e, param, lambda n: mul(sigma, binomial_difference(n, y, radical, radicand)))


# --------------------------------------------------------------------------
# back-substitution


def _sample_points(iv: Interval, n: int = 9) -> list[float]:
    lo, hi = float(iv.lo), float(iv.hi)
    if math.isinf(lo) and math.isinf(hi):
        lo, hi = -10.0, 10.0
    elif math.isinf(hi):
        hi = lo + max(8.0, 4 * abs(lo))
    elif math.isinf(lo):
        lo = hi - max(8.0, 4 * abs(hi))
    w = hi - lo
    m = min(0.25 * w, max(1e-4, 1e-3 * w))
    lo, hi = lo + m, hi - m
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    return [mid + half * math.cos((2 * k + 1) * math.pi / (2 * n)) for k in range(n)]


def _fixed_sign(e: Expr, name: str, iv: Interval) -> int:
    signs = set()
    for x in _sample_points(iv):
        try:
            v = eval_complex(e, {name: x})
        except _EVAL_ERRORS:
            return 0
        if abs(v.imag) > 1e-9 * (1 + abs(v)) or v.real == 0:
            return 0
        signs.add(1 if v.real > 0 else -1)
    return signs.pop() if len(signs) == 1 else 0


def _log_back(term: LogAbsTerm, sub, name: str, iv: Interval) -> Expr:
    arg = simplify(sub(term.arg))
    s = _fixed_sign(arg, name, iv)
    if s == 1:
        if isinstance(arg, Power) and arg.exponent == -1:
            return mul(-1, term.coeff, ln(arg.base))
        return mul(term.coeff, ln(arg))
    if s == -1:
        neg = simplify(mul(-1, arg))
        if isinstance(neg, Product) and len(neg.factors) == 2 and neg.factors[0] == Constant(-1):
            inner = neg.factors[1]
            if isinstance(inner, Power) and inner.exponent == -1:
                return mul(-1, term.coeff, ln(simplify(mul(-1, inner.base))))
        return mul(term.coeff, ln(neg))
    return mul(term.coeff, ln(abs_(arg)))


def _param_at(smap: SubstitutionMap, pexpr: Expr, x) -> float:
    plan = smap.plan
    if isinstance(x, float) and math.isinf(x):
        if plan.route in ("direct", "degenerate"):
            return x
        if plan.route == "usm" and plan.kind == 3:
            return math.inf if x > 0 else 0.0
        if plan.route == "usm" and plan.kind in (1, 2):
            return 0.0
        return math.nan
    try:
        v = eval_complex(pexpr, {smap.variable: float(x)})
    except _EVAL_ERRORS:
        return math.nan
    return v.real if abs(v.imag) < 1e-9 else math.nan


def _real_roots(e: Expr, param: str) -> list[float]:
    try:
        f = to_rational_function(e, param)
    except NotRational:
        return []
    out = []
    for poly in (f.num, f.den):
        if poly.deg < 1:
            continue
        for z in np.roots([float(c) for c in reversed(poly.c)]):
            if abs(z.imag) < 1e-9 * (1 + abs(z)):
                out.append(float(z.real))
    return out


def param_singularities(pa: ParamAntiderivative) -> list[float]:
    """Real parameter values where some term of ``pa`` is singular."""
    p = pa.param
    pts: list[float] = list(pa.singular_points)
    for t in pa.terms:
        if isinstance(t, LogAbsTerm):
            pts.extend(_real_roots(t.arg, p))
        elif isinstance(t, RationalTerm):
            pts.extend(_real_roots(rational_den_expr(t), p))
        elif isinstance(t, PowerTerm) and t.exponent.re < 0:
            pts.extend(_real_roots(t.base, p))
        elif isinstance(t, ChainTerm):
            for iv, _ in t.pieces[1:]:
                pts.append(float(iv.lo))
    return pts


def rational_den_expr(t: RationalTerm) -> Expr:
    from usm.expr.rational import poly_to_expr

    return poly_to_expr(t.f.den, Variable(t.param))


def split_points(pa: ParamAntiderivative, smap: SubstitutionMap, iv: Interval, pexpr: Expr) -> list[float]:
    if smap.plan.route == "exp_acos":
        return []  # unimodular parameter, no real singularities
    lo = _param_at(smap, pexpr, iv.lo)
    hi = _param_at(smap, pexpr, iv.hi)
    if math.isnan(lo) or math.isnan(hi):
        return []
    lo, hi = min(lo, hi), max(lo, hi)
    out = []
    for rho in param_singularities(pa):
        if lo < rho < hi and abs(rho - lo) > 1e-12 and abs(hi - rho) > 1e-12:
            try:
                x0 = eval_complex(smap.x_of_param, {smap.plan.param_name: rho}).real
            except _EVAL_ERRORS:
                continue
            if iv.lo < x0 < iv.hi and all(abs(x0 - c) > 1e-9 * max(1.0, abs(c)) for c in out):
                out.append(x0)
    return out


def _exp_route_power(t: PowerTerm, smap: SubstitutionMap, pexpr: Expr) -> Expr:
    # t^(k + m i) = exp(m acos y) * t^k with t = y - i W, 1/t = y + i W
    plan = smap.plan
    xv = Variable(smap.variable)
    y = mul(add(xv, plan.b), 1 / plan.a)
    k, m = t.exponent.re, t.exponent.im
    W = mul(1 / plan.a, sqrt(simplify(add(plan.a**2, mul(-1, pow_(add(xv, plan.b), 2))))))
    if k.denominator == 1:
        kk = int(k)
        tk = pow_(add(y, mul(-1, I, W)), kk) if kk >= 0 else pow_(add(y, mul(I, W)), -kk)
    else:
        tk = pow_(pexpr, k)
    factor = call("exp", mul(m, call("acos", y))) if m else ONE
    return mul(t.coeff, factor, tk)


def _nonzero_at_origin(e: Expr, param: str) -> bool:
    try:
        f = to_rational_function(e, param)
    except NotRational:
        return False
    return bool(f.num.c) and f.num.c[0] != 0 and f.den.c[0] != 0


def stable_param_expr(smap: SubstitutionMap, iv: Interval, pexpr: Expr) -> Expr:
    """Conjugate form of the parameter that avoids ``x - sqrt(x^2 - 1)`` cancellation.

    ``(x+b -+ sqrt(Q))/a = a/(x+b +- sqrt(Q))`` because ``(x+b)^2 - Q = a^2``.
    """
    plan = smap.plan
    if plan.route != "usm" or plan.kind not in (1, 2, 3):
        return pexpr
    xv = Variable(smap.variable)
    shifted = add(xv, plan.b)
    if plan.kind == 3:
        if iv.hi > -plan.b:
            return pexpr
        root = sqrt(simplify(add(pow_(shifted, 2), plan.a**2)))
        return mul(plan.a, pow_(add(root, mul(-1, shifted)), -1))
    root = sqrt(simplify(add(pow_(shifted, 2), -(plan.a**2))))
    sign = 1 if plan.branch is Branch.UPPER else -1
    return mul(plan.a, pow_(add(shifted, mul(sign, root)), -1))


def back_substitute(pa: ParamAntiderivative, smap: SubstitutionMap) -> Antiderivative:
    if pa.remainder is not None:
        raise ValueError("cannot back-substitute an antiderivative with a remainder")
    name = smap.variable
    pieces: list[tuple[Interval, Expr]] = []
    for iv, pexpr in smap.backsub:
        stable = stable_param_expr(smap, iv, pexpr)
        for sub_iv in iv.split_at(split_points(pa, smap, iv, pexpr)):
            pieces.append((sub_iv, _piece(pa, smap, sub_iv, stable, pexpr)))
    return Antiderivative(pieces, name)


def _piece(pa: ParamAntiderivative, smap: SubstitutionMap, iv: Interval, pexpr: Expr, plain: Expr) -> Expr:
    plan = smap.plan
    name = smap.variable
    xv = Variable(name)
    pname = plan.param_name
    p = Variable(pname)

    def sub(e: Expr, form: Expr = pexpr) -> Expr:
        if pname == name:
            return e
        return substitute(e, {pname: form})

    out: list[Expr] = []
    laurent: list[Expr] = []
    mid = _sample_points(iv, 1)[0]
    for t in pa.terms:
        if isinstance(t, PowerTerm) and t.base == p:
            if plan.route == "exp_acos":
                out.append(_exp_route_power(t, smap, pexpr))
            elif t.exponent.is_integer:
                laurent.append(t.to_expr())
            else:
                out.append(sub(t.to_expr()))
        elif isinstance(t, LogAbsTerm):
            if plan.route == "exp_acos" and t.arg == p:
                continue  # |t| = 1
            out.append(_log_back(t, sub, name, iv))
        elif (isinstance(t, RationalTerm) and t.f.den.c[0] != 0) or (
            isinstance(t, PowerTerm) and t.exponent.is_integer and _nonzero_at_origin(t.base, pname)
        ):
            # regular at p = 0, so absolute accuracy of p is enough
            out.append(sub(t.to_expr(), plain))
        elif isinstance(t, ChainTerm):
            out.append(sub(t.piece_at(_param_at(smap, pexpr, mid))))
        else:
            out.append(sub(t.to_expr()))
    if laurent:
        le = add(*laurent)
        if plan.route == "usm" and plan.kind in (1, 2):
            y = mul(add(xv, plan.b), 1 / plan.a)
            radicand = simplify(add(pow_(y, 2), -1))
            radical = mul(1 / plan.a, sqrt(simplify(add(pow_(add(xv, plan.b), 2), -(plan.a**2)))))
            le = collapse_reciprocal_powers(le, pname, plan.branch, y, radical, radicand)
        elif plan.route == "usm" and plan.kind in (4, 5):
            Y = mul(add(xv, plan.b), 1 / plan.a)
            Wsq = simplify(add(1, mul(-1, pow_(Y, 2))))
            W = mul(1 / plan.a, sqrt(simplify(add(plan.a**2, mul(-1, pow_(add(xv, plan.b), 2))))))
            le = _collapse(le, pname, lambda n: _circular_difference(n, Y, W, Wsq))
        out.append(sub(le))
    return simplify(add(*out))
