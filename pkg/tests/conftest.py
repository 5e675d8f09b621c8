import math
from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from usm.expr import Constant, Variable, add, call, compile_expr, mul, pow_

settings.register_profile("default", max_examples=100, deadline=None, print_blob=True)
settings.load_profile("default")

PYTHAGOREAN = (Fraction(5, 4), Fraction(13, 12), Fraction(5, 3))

small_rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
_FUNCS = ("sin", "cos", "exp", "atan", "asinh", "sinh", "ln", "sqrt")


def _leaf():
    return st.one_of(
        st.sampled_from([Variable("x"), Variable("y")]),
        small_rationals.map(Constant),
    )


def _extend(children):
    return st.one_of(
        st.lists(children, min_size=2, max_size=3).map(lambda xs: add(*xs)),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: mul(*xs)),
        st.tuples(children, st.integers(1, 3)).map(lambda p: pow_(p[0], p[1])),
        st.tuples(st.sampled_from(_FUNCS), children).map(
            lambda p: pow_(add(mul(p[1], p[1]), 1), Fraction(1, 2)) if p[0] == "sqrt" else call(p[0], p[1])
        ),
    )


expressions = st.recursive(_leaf(), _extend, max_leaves=8)


def num_close(a, b, rel=1e-9):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def value(e, **env):
    return compile_expr(e)({k: float(v) for k, v in env.items()})


def central_diff(fn, x):
    h = 2.220446049250313e-16 ** (1 / 3) * max(1.0, abs(x))
    return (fn(x + h) - fn(x - h)) / ((x + h) - (x - h))


def finite(v):
    return isinstance(v, complex) and math.isfinite(v.real) and math.isfinite(v.imag)
