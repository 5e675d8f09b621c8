"""Numerical evaluation on principal branches."""

from __future__ import annotations

import cmath
import math
from typing import Callable, Mapping

from usm import branchlib
from usm.expr.core import (
    AbsoluteValue,
    Call,
    Constant,
    Expr,
    ImaginaryUnit,
    Pi,
    Power,
    Product,
    Sum,
    Variable,
)


class PoleError(ArithmeticError):
    """Evaluation hit a pole or a logarithmic singularity."""


class NonRealError(ValueError):
    """A real value was requested but the result is genuinely complex."""


class UnboundVariableError(KeyError):
    pass


def _log(z):
    try:
        return branchlib.log(z)
    except branchlib.ExcludedPointError:
        raise PoleError("logarithm of zero") from None


def _inv(z):
    if z == 0:
        raise PoleError("division by zero")
    return 1 / z


def _checked(tag, fn):
    def run(z):
        try:
            return fn(z)
        except (branchlib.ExcludedPointError, ZeroDivisionError, ValueError, OverflowError):
            raise PoleError(f"{tag} is singular at {z}") from None

    return run


_CALLS: dict[str, Callable[[complex], complex]] = {
    "exp": cmath.exp,
    "ln": _log,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "tan": _checked("tan", lambda z: cmath.sin(z) / cmath.cos(z)),
    "sec": _checked("sec", lambda z: 1 / cmath.cos(z)),
    "csc": _checked("csc", lambda z: 1 / cmath.sin(z)),
    "asin": branchlib.asin,
    "acos": branchlib.acos,
    "atan": _checked("atan", branchlib.atan),
    "asec": _checked("asec", branchlib.asec),
    "acsc": _checked("acsc", branchlib.acsc),
    "asinh": branchlib.asinh,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
    "tanh": _checked("tanh", cmath.tanh),
}


def _power(b: complex, exponent) -> complex:
    if exponent.is_integer:
        n = int(exponent.re)
        if b == 0:
            if n < 0:
                raise PoleError("division by zero")
            return 0j
        try:
            return complex(b) ** n
        except OverflowError:
            raise PoleError("overflow") from None
    if b == 0:
        if exponent.re > 0:
            return 0j
        raise PoleError("zero to a non-positive power")
    if exponent.is_real and b.imag == 0 and b.real > 0:
        return complex(b.real ** float(exponent.re))
    return cmath.exp(complex(exponent) * branchlib.log(b))


def _mp_calls():
    import mpmath as mp

    def log(z):
        if z == 0:
            raise PoleError("logarithm of zero")
        return mp.log(z)

    def asin(z):
        return -1j * log(1j * z + mp.sqrt(1 - z * z))

    def nonzero(tag, fn):
        def run(z):
            if z == 0:
                raise PoleError(f"{tag} is singular at 0")
            return fn(z)

        return run

    def tan(z):
        c = mp.cos(z)
        if c == 0:
            raise PoleError("tan is singular")
        return mp.sin(z) / c

    return {
        "exp": mp.exp,
        "ln": log,
        "sin": mp.sin,
        "cos": mp.cos,
        "tan": tan,
        "sec": lambda z: 1 / mp.cos(z),
        "csc": nonzero("csc", lambda z: 1 / mp.sin(z)),
        "asin": asin,
        "acos": lambda z: mp.pi / 2 - asin(z),
        "atan": mp.atan,
        "asec": nonzero("asec", lambda z: mp.pi / 2 - asin(1 / z)),
        "acsc": nonzero("acsc", lambda z: asin(1 / z)),
        "asinh": lambda z: log(z + mp.sqrt(z * z + 1)),
        "sinh": mp.sinh,
        "cosh": mp.cosh,
        "tanh": mp.tanh,
    }


def _mp_power(b, exponent):
    import mpmath as mp

    if exponent.is_integer:
        n = int(exponent.re)
        if b == 0:
            if n < 0:
                raise PoleError("division by zero")
            return mp.mpc(0)
        return b**n
    if b == 0:
        if exponent.re > 0:
            return mp.mpc(0)
        raise PoleError("zero to a non-positive power")
    w = mp.mpc(mp.mpf(exponent.re.numerator) / exponent.re.denominator, mp.mpf(exponent.im.numerator) / exponent.im.denominator)
    return mp.exp(w * mp.log(b))


def compile_expr(e: Expr, precise: bool = False) -> Callable[[Mapping[str, complex]], complex]:
    """Compile ``e`` into a closure taking a bindings mapping.

    With ``precise`` the closure computes in mpmath at the caller's working
    precision and returns an ``mpc``.
    """
    if precise:
        return _compile_mp(e)
    memo: dict[Expr, Callable] = {}

    def build(node: Expr) -> Callable:
        if node in memo:
            return memo[node]
        if isinstance(node, Constant):
            v = complex(float(node.value))
            fn = lambda env: v
        elif isinstance(node, ImaginaryUnit):
            fn = lambda env: 1j
        elif isinstance(node, Pi):
            fn = lambda env: complex(math.pi)
        elif isinstance(node, Variable):
            name = node.name

            def fn(env, name=name):
                try:
                    return complex(env[name])
                except KeyError:
                    raise UnboundVariableError(name) from None
        elif isinstance(node, Sum):
            parts = [build(t) for t in node.terms]

            def fn(env, parts=parts):
                s = 0j
                for p in parts:
                    s += p(env)
                return s
        elif isinstance(node, Product):
            parts = [build(f) for f in node.factors]

            def fn(env, parts=parts):
                s = 1 + 0j
                for p in parts:
                    s *= p(env)
                return s
        elif isinstance(node, Power):
            inner = build(node.base)
            w = node.exponent
            fn = lambda env, inner=inner, w=w: _power(inner(env), w)
        elif isinstance(node, Call):
            inner = build(node.arg)
            f = _CALLS[node.tag]
            fn = lambda env, inner=inner, f=f: f(inner(env))
        elif isinstance(node, AbsoluteValue):
            inner = build(node.arg)
            fn = lambda env, inner=inner: complex(abs(inner(env)))
        else:
            raise TypeError(f"cannot evaluate {type(node).__name__}")
        memo[node] = fn
        return fn

    return build(e)


def _compile_mp(e: Expr) -> Callable:
    import mpmath as mp

    calls = _mp_calls()
    memo: dict[Expr, Callable] = {}

    def build(node: Expr) -> Callable:
        if node in memo:
            return memo[node]
        if isinstance(node, Constant):
            q = node.value
            fn = lambda env, q=q: mp.mpf(q.numerator) / q.denominator
        elif isinstance(node, ImaginaryUnit):
            fn = lambda env: mp.mpc(0, 1)
        elif isinstance(node, Pi):
            fn = lambda env: +mp.pi
        elif isinstance(node, Variable):
            name = node.name

            def fn(env, name=name):
                try:
                    return mp.mpc(env[name])
                except KeyError:
                    raise UnboundVariableError(name) from None
        elif isinstance(node, (Sum, Product)):
            parts = [build(a) for a in node.args]
            if isinstance(node, Sum):
                fn = lambda env, parts=parts: mp.fsum(p(env) for p in parts)
            else:

                def fn(env, parts=parts):
                    s = mp.mpc(1)
                    for p in parts:
                        s *= p(env)
                    return s
        elif isinstance(node, Power):
            inner = build(node.base)
            fn = lambda env, inner=inner, w=node.exponent: _mp_power(inner(env), w)
        elif isinstance(node, Call):
            inner = build(node.arg)
            f = calls[node.tag]
            fn = lambda env, inner=inner, f=f: f(inner(env))
        elif isinstance(node, AbsoluteValue):
            inner = build(node.arg)
            fn = lambda env, inner=inner: mp.mpc(abs(inner(env)))
        else:
            raise TypeError(f"cannot evaluate {type(node).__name__}")
        memo[node] = fn
        return fn

    return build(e)


def eval_complex(e: Expr, bindings: Mapping[str, complex] | None = None) -> complex:
    """Evaluate on principal branches; ``w``-powers are ``exp(w*Log(base))``."""
    try:
        return compile_expr(e)(bindings or {})
    except ZeroDivisionError:
        raise PoleError("division by zero") from None


def to_real(v: complex) -> float:
    if abs(v.imag) <= 1e-10 * (1 + abs(v)):
        return v.real
    raise NonRealError(f"value {v} is not real")


def eval_real(e: Expr, bindings: Mapping[str, float] | None = None) -> float:
    return to_real(eval_complex(e, bindings))


def real_function(e: Expr, name: str) -> Callable[[float], float]:
    """A fast ``float -> float`` evaluator of ``e`` in one variable."""
    fn = compile_expr(e)

    def f(x: float) -> float:
        try:
            return to_real(fn({name: x}))
        except ZeroDivisionError:
            raise PoleError("division by zero") from None

    return f
