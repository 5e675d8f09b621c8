"""Exact integration in the transform parameter.

Rational integrands go through partial fractions over Q (linear and
quadratic factors found by :func:`usm.poly.split_factors`).  Powers with
Gaussian or half-integer exponents are integrated termwise, and the two
``sqrt(p^2 + 1)`` shapes are read off a fixed table.  Anything else is
handed back as a remainder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from usm.expr import (
    ONE,
    ZERO,
    Constant,
    Expr,
    GaussianRational,
    Power,
    Product,
    Sum,
    Variable,
    abs_,
    add,
    as_expr,
    call,
    free_symbols,
    ln,
    mul,
    pow_,
    simplify,
    sqrt,
)
from usm.expr.rational import NotRational, poly_to_expr, rational_to_expr, to_rational_function
from usm.poly import Poly, RationalFunction, partial_fractions

__all__ = [
    "ArctanTerm",
    "ChainTerm",
    "LogAbsTerm",
    "ParamAntiderivative",
    "PowerTerm",
    "RationalTerm",
    "TableTerm",
    "integrate_expression",
    "integrate_rational",
    "integrate_table",
    "to_rational_function",
]


@dataclass(frozen=True)
class PowerTerm:
    """``coeff * base^exponent``; ``exponent != 0`` and base defaults to the parameter."""

    coeff: Expr
    exponent: GaussianRational
    base: Expr

    def to_expr(self) -> Expr:
        return mul(self.coeff, pow_(self.base, self.exponent))


@dataclass(frozen=True)
class LogAbsTerm:
    coeff: Expr
    arg: Expr

    def to_expr(self) -> Expr:
        return mul(self.coeff, ln(abs_(self.arg)))


@dataclass(frozen=True)
class ArctanTerm:
    coeff: Expr
    arg: Expr

    def to_expr(self) -> Expr:
        return mul(self.coeff, call("atan", self.arg))


@dataclass(frozen=True)
class RationalTerm:
    coeff: Expr
    f: RationalFunction
    param: str

    def to_expr(self) -> Expr:
        return mul(self.coeff, rational_to_expr(self.f, Variable(self.param)))


TABLE_TAGS = ("sqrt_p2_plus_1", "log_ratio_sqrt")


@dataclass(frozen=True)
class TableTerm:
    coeff: Expr
    tag: str
    arg: Expr

    def to_expr(self) -> Expr:
        s = sqrt(add(pow_(self.arg, 2), 1))
        if self.tag == "sqrt_p2_plus_1":
            return mul(self.coeff, s)
        ratio = mul(add(self.arg, s, -1), pow_(add(self.arg, s, 1), -1))
        return mul(self.coeff, ln(abs_(ratio)))


@dataclass(frozen=True)
class ChainTerm:
    """Result of a nested transform applied to part of the integrand.

    ``pieces`` are ``(Interval, Expr)`` in the outer parameter.
    """

    coeff: Expr
    pieces: tuple
    result: object = field(default=None, compare=False, repr=False)

    def to_expr(self) -> Expr:
        return mul(self.coeff, self.pieces[0][1])

    def piece_at(self, value: float) -> Expr:
        for iv, e in self.pieces:
            if iv.lo <= value <= iv.hi:
                return mul(self.coeff, e)
        return self.to_expr()


Term = Union[PowerTerm, LogAbsTerm, ArctanTerm, RationalTerm, TableTerm, ChainTerm]


@dataclass
class ParamAntiderivative:
    param: str
    terms: list = field(default_factory=list)
    remainder: Optional[Expr] = None
    # real poles of the integrand, so pieces can be split there
    singular_points: list = field(default_factory=list)

    def to_expr(self) -> Expr:
        return add(*(t.to_expr() for t in self.terms))

    def extend(self, other: "ParamAntiderivative") -> None:
        self.terms.extend(other.terms)
        self.singular_points.extend(other.singular_points)
        if other.remainder is not None:
            self.remainder = other.remainder if self.remainder is None else add(self.remainder, other.remainder)

    def scaled(self, k: Expr) -> "ParamAntiderivative":
        if k == ONE:
            return self
        out = ParamAntiderivative(self.param)
        for t in self.terms:
            out.terms.append(_scale_term(t, k))
        if self.remainder is not None:
            out.remainder = mul(k, self.remainder)
        out.singular_points = list(self.singular_points)
        return out


def _scale_term(t: Term, k: Expr) -> Term:
    cls = type(t)
    fields = dict(t.__dict__)
    fields["coeff"] = mul(k, t.coeff)
    return cls(**fields)


# --------------------------------------------------------------------------
# rational functions


def _merge_logs(terms: list) -> list:
    logs: dict[Expr, Expr] = {}
    out = []
    for t in terms:
        if isinstance(t, LogAbsTerm):
            logs[t.arg] = add(logs.get(t.arg, ZERO), t.coeff)
        else:
            out.append(t)
    out.extend(LogAbsTerm(c, a) for a, c in logs.items() if c != ZERO)
    return out


def _power_terms(coeffs: dict[int, Fraction], p: Variable) -> list:
    """Integrate ``sum c_k p^k`` termwise."""
    out = []
    for k, c in sorted(coeffs.items(), reverse=True):
        if not c:
            continue
        if k == -1:
            out.append(LogAbsTerm(Constant(c), p))
        else:
            out.append(PowerTerm(Constant(c / (k + 1)), GaussianRational(k + 1), p))
    return out


def _quadratic_terms(g: Poly, k: int, num: Poly, p: Variable) -> tuple[RationalFunction, list]:
    """Integrate ``(B p + C) / g^k`` for monic irreducible quadratic ``g``."""
    gamma, beta = g.c[0], g.c[1]
    B = num.c[1] if num.deg >= 1 else Fraction(0)
    C = num.c[0] if num.c else Fraction(0)
    delta = 4 * gamma - beta * beta
    rational = RationalFunction.const(0)
    terms: list = []
    G = RationalFunction(g)
    lin = RationalFunction(Poly((beta, 2)))
    # (B/2) g'/g^k part
    if B:
        if k == 1:
            terms.append(LogAbsTerm(Constant(B / 2), poly_to_expr(g, p)))
        else:
            rational = rational + RationalFunction.const(-B / (2 * (k - 1))) * G ** (1 - k)
    K = C - B * beta / 2
    # K * I_k with the reduction I_n = lin/((n-1) delta g^(n-1)) + 2(2n-3)/((n-1) delta) I_(n-1)
    while K and k > 1:
        rational = rational + RationalFunction.const(K / ((k - 1) * delta)) * lin * G ** (1 - k)
        K = K * 2 * (2 * k - 3) / ((k - 1) * delta)
        k -= 1
    if K:
        two_p_beta = add(mul(2, p), beta)
        if delta > 0:
            root = sqrt(Constant(delta))
            terms.append(ArctanTerm(mul(2 * K, pow_(root, -1)), mul(two_p_beta, pow_(root, -1))))
        else:
            root = sqrt(Constant(-delta))
            arg = mul(add(two_p_beta, mul(-1, root)), pow_(add(two_p_beta, root), -1))
            terms.append(LogAbsTerm(mul(K, pow_(root, -1)), arg))
    return rational, terms


def _real_poles(den: Poly) -> list[float]:
    import numpy as np

    if den.deg < 1:
        return []
    roots = np.roots([float(c) for c in reversed(den.c)])
    return [float(z.real) for z in roots if abs(z.imag) < 1e-9 * (1 + abs(z))]


def integrate_rational(f: RationalFunction, param: str = "t") -> ParamAntiderivative:
    """Antiderivative of a reduced rational function (constants dropped)."""
    p = Variable(param)
    out = ParamAntiderivative(param)
    if f.is_zero():
        return out
    if f.den.is_monomial():
        k = f.den.deg
        out.terms = _power_terms({i - k: c for i, c in enumerate(f.num.c) if c}, p)
        return out
    poly, pieces, leftover = partial_fractions(f)
    out.singular_points = _real_poles(f.den)
    terms = _power_terms({i: c for i, c in enumerate(poly.c) if c}, p)
    rational = RationalFunction.const(0)
    for g, k, num in pieces:
        if g.deg == 1:
            rho = -g.c[0]
            c = num.c[0]
            base = p if rho == 0 else add(p, -rho)
            if k == 1:
                terms.append(LogAbsTerm(Constant(c), base))
            else:
                terms.append(PowerTerm(Constant(c / (1 - k)), GaussianRational(1 - k), base))
        else:
            r, extra = _quadratic_terms(g, k, num, p)
            rational = rational + r
            terms.extend(extra)
    if not rational.is_zero():
        if rational.den.is_monomial():
            kk = rational.den.deg
            for i, c in enumerate(rational.num.c):
                if c:
                    terms.append(PowerTerm(Constant(c), GaussianRational(i - kk), p))
        else:
            terms.append(RationalTerm(ONE, rational, param))
    out.terms = _merge_logs(terms)
    if leftover:
        out.remainder = add(*(mul(poly_to_expr(n, p), pow_(poly_to_expr(d, p), -1)) for n, d in leftover))
    return out


# --------------------------------------------------------------------------
# general expressions: constant groups, powers, table


def _split_term(term: Expr, param: str) -> tuple[Expr, Fraction, list[Expr]]:
    """``term = K * c * prod(pfactors)``, K free of the parameter and of rationals."""
    factors = term.factors if isinstance(term, Product) else (term,)
    k_factors, p_factors = [], []
    c = Fraction(1)
    for f in factors:
        if isinstance(f, Constant):
            c *= f.value
        elif param in free_symbols(f):
            p_factors.append(f)
        else:
            k_factors.append(f)
    return mul(*k_factors), c, p_factors


def _is_p2_plus_1(e: Expr, param: str) -> bool:
    try:
        f = to_rational_function(e, param)
    except NotRational:
        return False
    return f.den.is_one() and f.num == Poly((1, 0, 1))


@dataclass
class _Group:
    rational: RationalFunction = field(default_factory=lambda: RationalFunction.const(0))
    table: RationalFunction = field(default_factory=lambda: RationalFunction.const(0))
    powers: dict = field(default_factory=dict)
    rest: list = field(default_factory=list)


def _classify(c: Fraction, p_factors: list[Expr], param: str, group: _Group) -> None:
    ppart = mul(c, *p_factors)
    try:
        group.rational = group.rational + to_rational_function(ppart, param)
        return
    except NotRational:
        pass
    p = Variable(param)
    rational_fs, odd = [], []
    w_total = GaussianRational(0)
    for f in p_factors:
        if isinstance(f, Power) and f.base == p:
            w_total = w_total + f.exponent
        elif isinstance(f, Power) and not f.exponent.is_integer:
            odd.append(f)
        else:
            rational_fs.append(f)
    try:
        r = to_rational_function(mul(c, *rational_fs), param)
    except NotRational:
        group.rest.append(ppart)
        return
    if not odd and r.den.is_monomial():
        # Laurent polynomial cofactor: spread over the powers
        shift = r.den.deg
        lc = r.den.lc
        for k, coef in enumerate(r.num.c):
            if coef:
                w = w_total + (k - shift)
                group.powers[w] = group.powers.get(w, Fraction(0)) + coef / lc
        return
    if (
        len(odd) == 1
        and odd[0].exponent.is_real
        and odd[0].exponent.re.denominator == 2
        and w_total.is_integer
        and _is_p2_plus_1(odd[0].base, param)
    ):
        # fold to R(p) * (p^2 + 1)^(-1/2)
        h = odd[0].exponent.re
        lift = int(h + Fraction(1, 2))
        R = r * RationalFunction.x() ** int(w_total.re) * RationalFunction(Poly((1, 0, 1))) ** lift
        group.table = group.table + R
        return
    group.rest.append(ppart)


def _table_terms(R: RationalFunction, param: str) -> tuple[list, Optional[Expr]]:
    p = Variable(param)
    S = sqrt(add(pow_(p, 2), 1))
    if R.is_zero():
        return [], None
    if not R.den.is_monomial():
        return [], mul(rational_to_expr(R, p), pow_(S, -1))
    k = R.den.deg
    terms, rest = [], []
    for i, c in enumerate(R.num.c):
        if not c:
            continue
        n = i - k
        if n == 1:
            terms.append(TableTerm(Constant(c), "sqrt_p2_plus_1", p))
        elif n == -1:
            terms.append(TableTerm(Constant(c), "log_ratio_sqrt", p))
        else:
            rest.append(mul(c, pow_(p, n), pow_(S, -1)))
    return terms, (add(*rest) if rest else None)


def integrate_expression(e: Expr, param: str) -> ParamAntiderivative:
    """Integrate a simplified parameter-space integrand term by term."""
    out = ParamAntiderivative(param)
    if param not in free_symbols(e):
        if e != ZERO:
            out.terms.append(PowerTerm(e, GaussianRational(1), Variable(param)))
        return out
    try:
        return integrate_rational(to_rational_function(e, param), param)
    except NotRational:
        pass
    groups: dict[Expr, _Group] = {}
    for term in e.terms if isinstance(e, Sum) else (e,):
        K, c, pf = _split_term(term, param)
        _classify(c, pf, param, groups.setdefault(K, _Group()))
    p = Variable(param)
    for K, g in groups.items():
        part = integrate_rational(g.rational, param)
        for w, c in g.powers.items():
            if not c:
                continue
            if w == -1:
                part.terms.append(LogAbsTerm(Constant(c), p))
            else:
                part.terms.append(PowerTerm(mul(c, as_expr(1 / (w + 1))), w + 1, p))
        tt, tr = _table_terms(g.table, param)
        part.terms.extend(tt)
        if tr is not None:
            part.remainder = tr if part.remainder is None else add(part.remainder, tr)
        if g.rest:
            r = add(*g.rest)
            part.remainder = r if part.remainder is None else add(part.remainder, r)
        part = part.scaled(K)
        out.extend(part)
    if out.remainder is not None:
        out.remainder = simplify(out.remainder)
        if out.remainder == ZERO:
            out.remainder = None
    return out


def integrate_table(e: Expr, param: str) -> ParamAntiderivative:
    """Table path: combinations of ``p/sqrt(p^2+1)`` and ``1/(p sqrt(p^2+1))``."""
    out = ParamAntiderivative(param)
    if e == ZERO:
        return out
    for term in e.terms if isinstance(e, Sum) else (e,):
        K, c, pf = _split_term(term, param)
        sub = _Group()
        _classify(c, pf, param, sub)
        if sub.rational.is_zero() and not sub.powers and not sub.rest:
            part = ParamAntiderivative(param)
            part.terms, part.remainder = _table_terms(sub.table, param)
            out.extend(part.scaled(K))
        else:
            out.extend(ParamAntiderivative(param, [], term))
    return out
