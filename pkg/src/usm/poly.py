"""Dense univariate polynomials and rational functions over the rationals."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable

import numpy as np


class Poly:
    """Coefficients low to high, trailing zeros stripped."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, v) -> "Poly":
        return cls((v,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, k: int, v=1) -> "Poly":
        return cls([0] * k + [v])

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    @property
    def lc(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def is_zero(self) -> bool:
        return not self.c

    def is_one(self) -> bool:
        return self.c == (1,)

    def is_monomial(self) -> bool:
        return bool(self.c) and all(v == 0 for v in self.c[:-1])

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"Poly({[str(v) for v in self.c]})"

    def __neg__(self):
        return Poly(-v for v in self.c)

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.c), len(other.c))
        a = self.c + (Fraction(0),) * (n - len(self.c))
        b = other.c + (Fraction(0),) * (n - len(other.c))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(v * other for v in self.c)
        if not self.c or not other.c:
            return Poly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        q = [Fraction(0)] * max(len(r) - len(other.c) + 1, 0)
        inv = 1 / other.lc
        d = other.deg
        for k in range(len(r) - 1, d - 1, -1):
            coef = r[k] * inv
            if coef:
                q[k - d] = coef
                for j, b in enumerate(other.c):
                    r[k - d + j] -= coef * b
        return Poly(q), Poly(r[:d] if d > 0 else [])

    def __floordiv__(self, other):
        return self.divmod(_coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(_coerce(other))[1]

    def exquo(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def __call__(self, x):
        acc = 0 * x
        for v in reversed(self.c):
            acc = acc * x + v
        return acc

    def eval_float(self, x: complex) -> complex:
        acc = 0j
        for v in reversed(self.c):
            acc = acc * x + float(v)
        return acc

    def deriv(self) -> "Poly":
        return Poly(k * v for k, v in enumerate(self.c) if k)

    def integral(self) -> "Poly":
        return Poly([0] + [v / (k + 1) for k, v in enumerate(self.c)])

    def monic(self) -> "Poly":
        if not self.c:
            return self
        return self * (1 / self.lc)

    def trailing_order(self) -> int:
        """Multiplicity of the root 0."""
        for k, v in enumerate(self.c):
            if v:
                return k
        return 0

    def shift_down(self, k: int) -> "Poly":
        return Poly(self.c[k:])


def _coerce(v) -> Poly:
    if isinstance(v, Poly):
        return v
    return Poly.const(v)


ONE = Poly.const(1)
X = Poly.x()


def gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, a % b
    return a.monic() if a else ONE


def xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g`` and ``g`` monic."""
    r0, r1 = a, b
    s0, s1 = ONE, Poly()
    t0, t1 = Poly(), ONE
    while r1:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return ONE, Poly(), Poly()
    inv = 1 / r0.lc
    return r0 * inv, s0 * inv, t0 * inv


def solve_bezout(a: Poly, b: Poly, c: Poly) -> tuple[Poly, Poly]:
    """Solve ``s*a + t*b = c`` with ``deg s < deg b`` (a, b coprime)."""
    g, s, t = xgcd(a, b)
    if g.deg > 0:
        raise ArithmeticError("solve_bezout needs coprime polynomials")
    q, s = (s * c).divmod(b)
    t = (c - s * a).exquo(b)
    return s, t


def squarefree(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's decomposition: monic ``a_i`` with ``p = lc * prod a_i**i``.

    Only factors of positive degree are returned.
    """
    if p.deg <= 0:
        return []
    f = p.monic()
    df = f.deriv()
    a0 = gcd(f, df)
    b = f.exquo(a0)
    c = df.exquo(a0)
    d = c - b.deriv()
    out = []
    i = 1
    while b.deg > 0:
        a = gcd(b, d)
        b = b.exquo(a)
        c = d.exquo(a)
        d = c - b.deriv()
        if a.deg > 0:
            out.append((a, i))
        i += 1
    return out


# --------------------------------------------------------------------------
# factor splitting


def _integer_leading(p: Poly) -> int:
    from math import lcm

    den = 1
    for v in p.c:
        den = lcm(den, v.denominator)
    lead = p.lc * den
    from math import gcd as igcd

    g = 0
    for v in p.c:
        g = igcd(g, int(v * den))
    return abs(int(lead) // g) if g else 1


def _candidates(value: float, max_den: int) -> list[Fraction]:
    out = []
    if not np.isfinite(value):
        return out
    for d in (max_den, 1, 2, 3, 4, 6, 8, 12):
        try:
            out.append(Fraction(value).limit_denominator(max(d, 1)))
        except (OverflowError, ValueError):
            pass
    return list(dict.fromkeys(out))


def _roots(p: Poly) -> np.ndarray:
    coeffs = [float(v) for v in reversed(p.c)]
    try:
        return np.roots(coeffs)
    except (np.linalg.LinAlgError, ValueError):
        return np.array([])


def split_factors(p: Poly) -> tuple[list[Poly], list[Poly], list[Poly]]:
    """Split a squarefree polynomial into monic rational linear factors,
    irreducible rational quadratics, and whatever could not be split.

    Candidate factors come from numerical roots; every factor is confirmed
    by exact division, so a failure only leaves more in the leftover list.
    """
    rest = p.monic()
    linear: list[Poly] = []
    quadratic: list[Poly] = []
    while rest.deg >= 1 and rest.c[0] == 0:
        linear.append(X)
        rest = rest.exquo(X)
    if rest.deg >= 1:
        max_den = max(_integer_leading(rest), 1)
        for z in _roots(rest):
            if rest.deg < 1:
                break
            if abs(z.imag) > 1e-7 * (1 + abs(z)):
                continue
            for cand in _candidates(z.real, max_den):
                if rest.deg >= 1 and rest(cand) == 0:
                    f = Poly((-cand, 1))
                    linear.append(f)
                    rest = rest.exquo(f)
                    break
    if rest.deg == 2:
        quadratic.append(rest)
        rest = ONE
    elif rest.deg > 2:
        max_den = max(_integer_leading(rest), 1)
        roots = list(_roots(rest))
        used: set[int] = set()
        for i, j in combinations(range(len(roots)), 2):
            if i in used or j in used or rest.deg < 3:
                continue
            s = roots[i] + roots[j]
            q = roots[i] * roots[j]
            if abs(s.imag) > 1e-6 * (1 + abs(s)) or abs(q.imag) > 1e-6 * (1 + abs(q)):
                continue
            found = False
            for cs in _candidates(-s.real, max_den):
                for cq in _candidates(q.real, max_den):
                    f = Poly((cq, cs, 1))
                    if not (rest % f):
                        quadratic.append(f)
                        rest = rest.exquo(f)
                        used.update((i, j))
                        found = True
                        break
                if found:
                    break
        if rest.deg == 2:
            quadratic.append(rest)
            rest = ONE
    leftover = [rest] if rest.deg > 0 else []
    return linear, quadratic, leftover


# --------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """``numerator / denominator`` in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = ONE, reduced: bool = False):
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            g = gcd(num, den)
            if g.deg > 0:
                num = num.exquo(g)
                den = den.exquo(g)
            lc = den.lc
            if lc != 1:
                num = num * (1 / lc)
                den = den * (1 / lc)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, v) -> "RationalFunction":
        return cls(Poly.const(v), ONE, reduced=True)

    @classmethod
    def x(cls) -> "RationalFunction":
        return cls(X, ONE, reduced=True)

    def __eq__(self, other):
        return isinstance(other, RationalFunction) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __add__(self, other):
        other = _rf(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        return self + (-_rf(other))

    def __rsub__(self, other):
        return _rf(other) - self

    def __mul__(self, other):
        other = _rf(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        return self * _rf(other).inverse()

    def __rtruediv__(self, other):
        return _rf(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num**n, self.den**n, reduced=True)

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def eval_float(self, x: complex) -> complex:
        return self.num.eval_float(x) / self.den.eval_float(x)

    def deriv(self) -> "RationalFunction":
        return RationalFunction(
            self.num.deriv() * self.den - self.num * self.den.deriv(), self.den * self.den
        )


def _rf(v) -> RationalFunction:
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, Poly):
        return RationalFunction(v, ONE, reduced=True)
    return RationalFunction.const(v)


def partial_fractions(f: RationalFunction):
    """Full decomposition ``f = poly + sum num / factor**k``.

    Returns ``(poly, terms, leftover)`` where ``terms`` is a list of
    ``(factor, k, numerator)`` with ``deg numerator < deg factor`` for each
    linear or irreducible quadratic factor, and ``leftover`` collects
    ``(numerator, factor**k)`` pieces over factors that could not be split.
    """
    poly, rem = f.num.divmod(f.den)
    pieces: list[tuple[Poly, int]] = []
    leftovers: list[tuple[Poly, int]] = []
    for a, mult in squarefree(f.den):
        lin, quad, rest = split_factors(a)
        pieces.extend((g, mult) for g in lin + quad)
        leftovers.extend((g, mult) for g in rest)
    blocks = [(g**m, g, m, True) for g, m in pieces] + [(g**m, g, m, False) for g, m in leftovers]
    terms = []
    left = []
    num = rem
    for idx, (block, g, m, split) in enumerate(blocks):
        others = ONE
        for jdx, (b2, *_rest) in enumerate(blocks):
            if jdx != idx:
                others = others * b2
        # num/(block*others): the share over block is num * others^-1 mod block
        if others.is_one():
            share = num % block
        else:
            _, inv, _ = xgcd(others, block)
            share = (num * inv) % block
        if not split:
            left.append((share, block))
            continue
        # g-adic expansion of share gives the numerators over g^k
        k = m
        q = share
        while q and k > 0:
            q, r = q.divmod(g)
            if r:
                terms.append((g, k, r))
            k -= 1
    return poly, terms, left
