"""The fixed rewrite set used throughout the engine.

Rules, applied bottom-up in a single pass:

* reconstruction through the normalizing constructors (constant folding,
  power merging ``b^p * b^q -> b^(p+q)``, flattening);
* expansion of integer powers ``2..8`` of sums with at most four terms, and
  distribution of products over sums while the result stays small;
* for variables declared positive, ``(u*v)^w -> u^w * v^w`` and
  ``(u^p)^w -> u^(p*w)`` on factors known to be positive;
* any subtree that is a rational function of one variable is replaced by
  its reduced canonical form, which cancels common factors such as
  ``1 +- t``, ``t^2 - 1`` or ``1 + r^2`` between numerator and denominator.
"""

from __future__ import annotations

from itertools import product as cartesian

from usm.expr.core import (
    Call,
    Constant,
    Expr,
    Pi,
    Power,
    Product,
    Sum,
    Variable,
    add,
    free_symbols,
    is_positive_constant,
    mul,
    pow_,
    rebuild,
)
from usm.expr.rational import NotRational, rational_to_expr, to_rational_function

MAX_EXPAND_DEGREE = 8
MAX_EXPAND_TERMS = 4
MAX_DISTRIBUTED_TERMS = 64


def is_positive(e: Expr, positive: frozenset[str]) -> bool:
    if is_positive_constant(e):
        return True
    if isinstance(e, Variable):
        return e.name in positive
    if isinstance(e, Power):
        return e.exponent.is_real and is_positive(e.base, positive)
    if isinstance(e, Product):
        return all(is_positive(f, positive) for f in e.factors)
    if isinstance(e, Sum):
        return all(is_positive(t, positive) for t in e.terms)
    if isinstance(e, Call) and e.tag in ("exp", "cosh"):
        return True if e.tag == "cosh" else _real(e.arg, positive)
    return False


def _real(e: Expr, positive: frozenset[str]) -> bool:
    if isinstance(e, (Constant, Pi)):
        return True
    if isinstance(e, Variable):
        return e.name in positive
    if isinstance(e, (Sum, Product)):
        return all(_real(a, positive) for a in e.args)
    if isinstance(e, Power):
        return e.exponent.is_real and is_positive(e.base, positive)
    return False


def _expand_power(base: Sum, n: int) -> Expr:
    out: Expr = base
    for _ in range(n - 1):
        out = _distribute(mul(out, base), force=True)
    return out


def _distribute(e: Expr, force: bool = False) -> Expr:
    if not isinstance(e, Product):
        return e
    sums = [f for f in e.factors if isinstance(f, Sum)]
    if not sums:
        return e
    others = [f for f in e.factors if not isinstance(f, Sum)]
    count = 1
    for s in sums:
        count *= len(s.terms)
    if count > MAX_DISTRIBUTED_TERMS and not force:
        return e
    terms = [mul(*others, *combo) for combo in cartesian(*(s.terms for s in sums))]
    return add(*terms)


def _positive_split(e: Power, positive: frozenset[str]) -> Expr:
    w = e.exponent
    b = e.base
    if not positive or w.is_integer:
        return e
    if isinstance(b, Power) and b.exponent.is_real and w.is_real and is_positive(b.base, positive):
        return pow_(b.base, b.exponent * w)
    if isinstance(b, Sum):
        return _split_sum_content(b, w, positive)
    if isinstance(b, Product):
        pos = [f for f in b.factors if is_positive(f, positive)]
        if pos:
            rest = [f for f in b.factors if not is_positive(f, positive)]
            parts = [_positive_split(p, positive) if isinstance(p, Power) else p for p in (pow_(f, w) for f in pos)]
            tail = pow_(mul(*rest), w) if rest else Constant(1)
            return mul(*parts, tail)
    return e


def _split_sum_content(b: Sum, w, positive: frozenset[str]) -> Expr:
    # (c * v^m * N/D)^w -> c^w * v^(m w) * (N/D)^w for c > 0 and v > 0
    syms = free_symbols(b)
    if len(syms) != 1 or not syms <= positive:
        return Power(b, w)
    (name,) = syms
    try:
        f = to_rational_function(b, name)
    except NotRational:
        return Power(b, w)
    num, den = f.num, f.den
    m = num.trailing_order() - den.trailing_order()
    num, den = num.shift_down(num.trailing_order()), den.shift_down(den.trailing_order())
    c = num.lc
    if m == 0 and abs(c) == 1:
        return Power(b, w)
    sign = 1 if c > 0 else -1
    from usm.poly import RationalFunction

    rest = rational_to_expr(RationalFunction(num * (sign / c), den), Variable(name))
    return mul(pow_(Constant(abs(c)), w), pow_(Variable(name), w * m), pow_(rest, w))


def _rules(e: Expr, positive: frozenset[str]) -> Expr:
    if isinstance(e, Power):
        w = e.exponent
        if (
            isinstance(e.base, Sum)
            and w.is_integer
            and 2 <= w.re <= MAX_EXPAND_DEGREE
            and len(e.base.terms) <= MAX_EXPAND_TERMS
        ):
            return _expand_power(e.base, int(w.re))
        return _positive_split(e, positive)
    if isinstance(e, Product):
        return _distribute(e)
    return e


def simplify(e: Expr, positive: frozenset[str] | set[str] = frozenset()) -> Expr:
    """Apply the fixed rewrite set.  ``positive`` names variables known > 0."""
    positive = frozenset(positive)
    memo: dict[Expr, Expr] = {}
    rf_memo: dict = {}

    def canon(node: Expr) -> Expr:
        if not isinstance(node, (Sum, Product, Power)):
            return node
        syms = free_symbols(node)
        if len(syms) != 1:
            return node
        (name,) = syms
        try:
            f = to_rational_function(node, name, rf_memo)
        except NotRational:
            return node
        return rational_to_expr(f, Variable(name))

    def go(node: Expr) -> Expr:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if not node.args:
            out = node
        else:
            out = rebuild(node, tuple(go(a) for a in node.args))
            prev = None
            # rules can expose further rule sites; bounded by expression size
            for _ in range(4):
                if out == prev:
                    break
                prev = out
                out = _rules(out, positive)
                if out != prev and out.args:
                    out = rebuild(out, tuple(go(a) for a in out.args))
            out = canon(out)
        memo[node] = out
        return out

    return go(e)
