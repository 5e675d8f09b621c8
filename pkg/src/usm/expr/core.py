"""Expression nodes and their normalizing constructors.

Every public constructor (``add``, ``mul``, ``pow_``, ``call``, ``abs_``)
returns a normalized tree: sums and products are flat and sorted, constants
are merged, equal bases in a product have their exponents added, and no
neutral elements survive.  Nodes are immutable and hash by structure.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]

FUNCTION_TAGS = frozenset(
    {
        "exp", "ln", "sin", "cos", "tan", "sec", "csc",
        "asin", "acos", "atan", "asec", "acsc", "asinh",
        "sinh", "cosh", "tanh",
    }
)


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational components."""

    __slots__ = ("re", "im")

    def __init__(self, re: Number = 0, im: Number = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, v) -> "GaussianRational":
        if isinstance(v, GaussianRational):
            return v
        if isinstance(v, (int, Fraction)):
            return cls(v)
        if isinstance(v, Rational):
            return cls(Fraction(v.numerator, v.denominator))
        raise TypeError(f"cannot make a Gaussian rational from {v!r}")

    @property
    def is_real(self) -> bool:
        return self.im == 0

    @property
    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"


# --------------------------------------------------------------------------
# nodes


class Expr:
    __slots__ = ("_key", "_hash", "_degree")

    def _setup(self, key, degree: Fraction = Fraction(0)):
        self._key = key
        self._hash = hash(key)
        self._degree = degree

    @property
    def args(self) -> tuple["Expr", ...]:
        return ()

    def sort_key(self):
        return self._key

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    # arithmetic sugar; all results are normalized
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(NEG_ONE, as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(NEG_ONE, self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, pow_(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), pow_(self, -1))

    def __neg__(self):
        return mul(NEG_ONE, self)

    def __pow__(self, w):
        return pow_(self, w)

    def __str__(self):
        from usm.expr.printer import to_string

        return to_string(self)

    def __repr__(self):
        return f"{type(self).__name__}<{self}>"

    def has(self, name: str) -> bool:
        return name in free_symbols(self)


class Constant(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        self.value = Fraction(value)
        self._setup((0, self.value))


class ImaginaryUnit(Expr):
    __slots__ = ()

    def __init__(self):
        self._setup((1,))


class Pi(Expr):
    __slots__ = ()

    def __init__(self):
        self._setup((2,))


class Variable(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._setup((3, name), Fraction(1))


class Power(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: GaussianRational):
        self.base = base
        self.exponent = exponent
        self._setup(
            (4, base._key, exponent.re, exponent.im), base._degree * exponent.re
        )

    @property
    def args(self):
        return (self.base,)


class Call(Expr):
    __slots__ = ("tag", "arg")

    def __init__(self, tag: str, arg: Expr):
        self.tag = tag
        self.arg = arg
        self._setup((5, tag, arg._key))

    @property
    def args(self):
        return (self.arg,)


class AbsoluteValue(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        self.arg = arg
        self._setup((6, arg._key), arg._degree)

    @property
    def args(self):
        return (self.arg,)


class Product(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple[Expr, ...]):
        self.factors = factors
        self._setup((7, tuple(f._key for f in factors)), sum((f._degree for f in factors), Fraction(0)))

    @property
    def args(self):
        return self.factors


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple[Expr, ...]):
        self.terms = terms
        self._setup((8, tuple(t._key for t in terms)), max(t._degree for t in terms))

    @property
    def args(self):
        return self.terms


ZERO = Constant(0)
ONE = Constant(1)
NEG_ONE = Constant(-1)
HALF = Constant(Fraction(1, 2))
I = ImaginaryUnit()
PI = Pi()


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not expressions")
    if isinstance(v, (int, Fraction)):
        return Constant(v)
    if isinstance(v, GaussianRational):
        return add(Constant(v.re), mul(Constant(v.im), I))
    if isinstance(v, str):
        return Variable(v)
    raise TypeError(f"cannot convert {v!r} to an expression")


def const(v: Number) -> Constant:
    return Constant(v)


def var(name: str) -> Variable:
    return Variable(name)


# --------------------------------------------------------------------------
# sums


def _split_coeff(e: Expr) -> tuple[Fraction, Expr]:
    if isinstance(e, Constant):
        return e.value, ONE
    if isinstance(e, Product) and isinstance(e.factors[0], Constant):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Product(rest)
    return Fraction(1), e


def _scale(c: Fraction, rest: Expr) -> Expr:
    if rest == ONE:
        return Constant(c)
    if c == 1:
        return rest
    tail = rest.factors if isinstance(rest, Product) else (rest,)
    return Product((Constant(c),) + tail)


def _sum_order(e: Expr):
    return (-e._degree, e._key)


def add(*args) -> Expr:
    collected: dict[Expr, Fraction] = {}
    stack = [as_expr(a) for a in reversed(args)]
    while stack:
        e = stack.pop()
        if isinstance(e, Sum):
            stack.extend(reversed(e.terms))
            continue
        c, rest = _split_coeff(e)
        if c == 0:
            continue
        collected[rest] = collected.get(rest, Fraction(0)) + c
    terms = [_scale(c, rest) for rest, c in collected.items() if c != 0]
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=_sum_order)
    return Sum(tuple(terms))


# --------------------------------------------------------------------------
# products


def _flatten_product(args: Iterable[Expr]):
    for a in args:
        if isinstance(a, Product):
            yield from a.factors
        else:
            yield a


def mul(*args) -> Expr:
    coeff = Fraction(1)
    icount = 0
    powers: dict[Expr, GaussianRational] = {}
    for f in _flatten_product(as_expr(a) for a in args):
        if isinstance(f, Constant):
            coeff *= f.value
        elif f is I or isinstance(f, ImaginaryUnit):
            icount += 1
        elif isinstance(f, Power):
            powers[f.base] = powers.get(f.base, GaussianRational(0)) + f.exponent
        else:
            powers[f] = powers.get(f, GaussianRational(0)) + 1
    if coeff == 0:
        return ZERO
    factors: list[Expr] = []
    again: list[Expr] = []
    for base, w in powers.items():
        if not w:
            continue
        p = pow_(base, w)
        if isinstance(p, Constant):
            coeff *= p.value
        elif isinstance(p, ImaginaryUnit):
            icount += 1
        elif isinstance(p, Product):
            again.append(p)
        elif isinstance(p, Power) and p.base != base:
            again.append(p)
        else:
            factors.append(p)
    if again:
        return mul(Constant(coeff), *([I] * (icount % 4)), *factors, *again)
    if coeff == 0:
        return ZERO
    icount %= 4
    if icount >= 2:
        coeff = -coeff
        icount -= 2
    if icount:
        factors.append(I)
    factors.sort(key=lambda e: e._key)
    if not factors:
        return Constant(coeff)
    if coeff != 1:
        factors.insert(0, Constant(coeff))
    elif len(factors) == 1:
        return factors[0]
    return Product(tuple(factors))


# --------------------------------------------------------------------------
# powers


def _small_primes(limit: int = 2000) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [p for p in range(limit + 1) if sieve[p]]


_PRIMES = _small_primes()


def _integer_root(n: int, m: int) -> int | None:
    """Exact integer m-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = round(n ** (1.0 / m)) if n < 2**1000 else int(math.exp(math.log(n) / m))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**m == n:
            return cand
    lo, hi = 0, 1 << (n.bit_length() // m + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**m < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**m == n else None


def _extract_root(n: int, m: int) -> tuple[int, int]:
    """Split n = s**m * r with r free of small m-th power factors."""
    full = _integer_root(n, m)
    if full is not None:
        return full, 1
    s = 1
    r = n
    for p in _PRIMES:
        pm = p**m
        if pm > r:
            break
        while r % pm == 0:
            r //= pm
            s *= p
    full = _integer_root(r, m)
    if full is not None:
        return s * full, 1
    return s, r


def _int_power(n: int, q: Fraction) -> Expr:
    # n > 0 integer, q non-integer rational
    if n == 1:
        return ONE
    k = math.floor(q)
    f = q - k
    p, m = f.numerator, f.denominator
    s, r = _extract_root(n, m)
    c = Fraction(n) ** k * Fraction(s) ** p
    if r == 1:
        return Constant(c)
    radical = Power(Constant(r), GaussianRational(f))
    if c == 1:
        return radical
    return Product((Constant(c), radical))


def _rational_power(c: Fraction, q: Fraction) -> Expr:
    num = _int_power(c.numerator, q)
    den = _int_power(c.denominator, -q)
    if den == ONE:
        return num
    if num == ONE:
        return den
    return mul(num, den)


def is_positive_constant(e: Expr) -> bool:
    if isinstance(e, Constant):
        return e.value > 0
    if isinstance(e, Pi):
        return True
    if isinstance(e, Power):
        return e.exponent.is_real and is_positive_constant(e.base)
    if isinstance(e, Product):
        return all(is_positive_constant(f) for f in e.factors)
    if isinstance(e, Call) and e.tag == "exp":
        return not free_symbols(e.arg) and is_real_constant(e.arg)
    return False


def is_real_constant(e: Expr) -> bool:
    if isinstance(e, (Constant, Pi)):
        return True
    if isinstance(e, ImaginaryUnit):
        return False
    if isinstance(e, Power):
        return e.exponent.is_real and is_positive_constant(e.base)
    if isinstance(e, (Product, Sum)):
        return all(is_real_constant(a) for a in e.args)
    if isinstance(e, Call):
        return e.tag in ("exp", "sin", "cos", "atan", "sinh", "cosh", "tanh", "asinh") and is_real_constant(e.arg)
    if isinstance(e, AbsoluteValue):
        return not free_symbols(e.arg)
    return False


def pow_(base, w) -> Expr:
    base = as_expr(base)
    w = GaussianRational.coerce(w)
    if not w:
        return ONE
    if w == 1:
        return base
    if isinstance(base, Constant):
        c = base.value
        if w.is_integer:
            n = int(w.re)
            if c == 0 and n < 0:
                raise ZeroDivisionError("zero raised to a negative power")
            return Constant(c**n)
        if c == 1:
            return ONE
        if c == 0:
            if w.re > 0:
                return ZERO
            raise ZeroDivisionError("zero raised to a non-positive power")
        if w.is_real:
            if c > 0:
                return _rational_power(c, w.re)
            if w.re.denominator == 2:
                # principal root of a negative number: (-c)^(p/2) = i^p |c|^(p/2)
                return mul(pow_(I, w.re.numerator), _rational_power(-c, w.re))
        return Power(base, w)
    if isinstance(base, ImaginaryUnit):
        if w.is_integer:
            k = int(w.re) % 4
            return (ONE, I, NEG_ONE, Product((NEG_ONE, I)))[k]
        return Power(base, w)
    if isinstance(base, Power):
        if w.is_integer:
            return pow_(base.base, base.exponent * w)
        return Power(base, w)
    if isinstance(base, Product):
        if w.is_integer:
            return mul(*(pow_(f, w) for f in base.factors))
        pos = [f for f in base.factors if is_positive_constant(f)]
        if pos:
            rest = [f for f in base.factors if not is_positive_constant(f)]
            return mul(*(pow_(f, w) for f in pos), pow_(mul(*rest), w))
        return Power(base, w)
    return Power(base, w)


def sqrt(e) -> Expr:
    return pow_(e, Fraction(1, 2))


# --------------------------------------------------------------------------
# calls and absolute values

_AT_ZERO = {
    "exp": ONE, "sin": ZERO, "cos": ONE, "tan": ZERO, "sec": ONE,
    "asin": ZERO, "atan": ZERO, "asinh": ZERO, "sinh": ZERO,
    "cosh": ONE, "tanh": ZERO,
}


def call(tag: str, arg) -> Expr:
    arg = as_expr(arg)
    if tag == "sqrt":
        return sqrt(arg)
    if tag == "abs":
        return abs_(arg)
    if tag not in FUNCTION_TAGS:
        raise ValueError(f"unknown function {tag!r}")
    if arg == ZERO and tag in _AT_ZERO:
        return _AT_ZERO[tag]
    if tag == "ln" and arg == ONE:
        return ZERO
    if tag == "exp" and isinstance(arg, Call) and arg.tag == "ln":
        return arg.arg
    return Call(tag, arg)


def abs_(e) -> Expr:
    e = as_expr(e)
    if isinstance(e, Constant):
        return Constant(abs(e.value))
    if isinstance(e, ImaginaryUnit):
        return ONE
    if isinstance(e, AbsoluteValue) or is_positive_constant(e):
        return e
    if isinstance(e, Product) and isinstance(e.factors[0], Constant):
        c, rest = _split_coeff(e)
        return mul(Constant(abs(c)), abs_(rest))
    return AbsoluteValue(e)


def exp(e) -> Expr:
    return call("exp", e)


def ln(e) -> Expr:
    return call("ln", e)


# --------------------------------------------------------------------------
# traversal helpers


def free_symbols(e: Expr) -> frozenset[str]:
    if isinstance(e, Variable):
        return frozenset((e.name,))
    out: frozenset[str] = frozenset()
    for a in e.args:
        out |= free_symbols(a)
    return out


def rebuild(e: Expr, args: tuple[Expr, ...]) -> Expr:
    """Reconstruct ``e`` with new children through the normalizing constructors."""
    if isinstance(e, Sum):
        return add(*args)
    if isinstance(e, Product):
        return mul(*args)
    if isinstance(e, Power):
        return pow_(args[0], e.exponent)
    if isinstance(e, Call):
        return call(e.tag, args[0])
    if isinstance(e, AbsoluteValue):
        return abs_(args[0])
    return e


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    cache: dict[Expr, Expr] = {}

    def go(node: Expr) -> Expr:
        if node in cache:
            return cache[node]
        if isinstance(node, Variable):
            out = mapping.get(node.name, node)
        elif node.args:
            out = rebuild(node, tuple(go(a) for a in node.args))
        else:
            out = node
        cache[node] = out
        return out

    return go(e)


def walk(e: Expr):
    """Pre-order traversal."""
    yield e
    for a in e.args:
        yield from walk(a)
