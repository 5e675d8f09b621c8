"""Principal branches of the inverse functions and the identity oracles.

Every inverse function is derived from the principal logarithm (cut along
``(-inf, 0]``) and the principal square root, so that real arguments in the
classical domains land in the classical ranges:

* ``acos y`` in ``[0, pi]`` and ``asin y`` in ``[-pi/2, pi/2]`` for ``|y| <= 1``;
* ``asec y`` in ``[0, pi]`` minus ``pi/2`` and ``acsc y`` in
  ``(-pi/2, 0) U (0, pi/2]`` for ``|y| >= 1``;
* ``sqrt(y**2 - 1) = i*sqrt(1 - y**2)`` with non-negative imaginary part
  for ``|y| < 1``.

The ``*_sides`` functions return both sides of each identity, evaluated in
double precision, so callers can sweep them over grids.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

# Oracles refuse to evaluate this close to the points where the identities
# only hold by a limit.
SINGULAR_MARGIN = 1e-6


class ExcludedPointError(ValueError):
    """The function is undefined at the requested point."""


class DomainViolation(ValueError):
    """An identity was requested outside the domain where it holds."""


def _clean(z: complex) -> complex:
    # a negative real with imag part -0.0 would land on the lower lip of the
    # cut; principal values are taken from the upper lip
    z = complex(z)
    if z.imag == 0.0:
        return complex(z.real, 0.0)
    return z


def log(z: complex) -> complex:
    z = _clean(z)
    if z == 0:
        raise ExcludedPointError("log(0)")
    return cmath.log(z)


def sqrt(z: complex) -> complex:
    return cmath.sqrt(_clean(z))


def _stable_sum(s: complex, u: complex) -> complex:
    # s + u where (s + u)(s - u) = 1; take the reciprocal when the sum cancels
    plus, minus = s + u, s - u
    return plus if abs(plus) >= abs(minus) else 1 / minus


def asin(z: complex) -> complex:
    z = complex(z)
    return -1j * log(_stable_sum(sqrt(1 - z * z), 1j * z))


def acos(z: complex) -> complex:
    return math.pi / 2 - asin(z)


def asec(z: complex) -> complex:
    if z == 0:
        raise ExcludedPointError("asec(0)")
    return acos(1 / complex(z))


def acsc(z: complex) -> complex:
    if z == 0:
        raise ExcludedPointError("acsc(0)")
    return asin(1 / complex(z))


def asinh(z: complex) -> complex:
    z = complex(z)
    return log(_stable_sum(sqrt(z * z + 1), z))


def atan(z: complex) -> complex:
    z = complex(z)
    if z == 1j or z == -1j:
        raise ExcludedPointError("atan(+-i)")
    return cmath.atan(_clean(z))


CATALOGUE = {
    "log": log,
    "ln": log,
    "sqrt": sqrt,
    "asin": asin,
    "acos": acos,
    "asec": asec,
    "acsc": acsc,
    "asinh": asinh,
    "atan": atan,
}


def principal(tag: str, z: complex) -> complex:
    """Principal value of the catalogued function ``tag`` at ``z``."""
    try:
        fn = CATALOGUE[tag]
    except KeyError:
        raise ValueError(f"{tag!r} is not in the principal-branch catalogue") from None
    return fn(z)


# --------------------------------------------------------------------------
# identity oracles


@dataclass(frozen=True)
class IdentitySides:
    lhs: complex
    rhs: complex
    abs_error: float

    @classmethod
    def of(cls, lhs: complex, rhs: complex) -> "IdentitySides":
        return cls(complex(lhs), complex(rhs), abs(complex(lhs) - complex(rhs)))


def _tan(z: complex) -> complex:
    return cmath.tan(z)


def thm1_sides(y: float, part: str, form: str = "csc") -> IdentitySides:
    """The cos-core identity of ``exp(+-i*acos y)``.

    Part ``"A"`` (``|y| <= 1``): ``exp(-i acos y) = y - sqrt(y^2 - 1)``.
    Part ``"B"`` (``|y| >= 1``): ``exp(+i acos y)`` for ``y >= 1`` and
    ``exp(-i acos y)`` for ``y <= -1`` equals ``tan(acsc(y)/2)`` (``form="csc"``)
    or ``(1 - tan(asec(y)/2)) / (1 + tan(asec(y)/2))`` (``form="sec"``).
    """
    y = float(y)
    alpha = acos(y)
    if part == "A":
        if abs(y) > 1:
            raise DomainViolation("part A needs |y| <= 1")
        return IdentitySides.of(cmath.exp(-1j * alpha), y - sqrt(y * y - 1))
    if part != "B":
        raise ValueError(f"unknown part {part!r}")
    if abs(y) < 1:
        raise DomainViolation("part B needs |y| >= 1")
    lhs = cmath.exp(1j * alpha) if y >= 1 else cmath.exp(-1j * alpha)
    if form == "csc":
        rhs = _tan(acsc(y) / 2)
    elif form == "sec":
        if abs(y + 1) < SINGULAR_MARGIN:
            raise DomainViolation("sec form at y = -1 only holds by limit")
        h = _tan(asec(y) / 2)
        rhs = (1 - h) / (1 + h)
    else:
        raise ValueError(f"unknown form {form!r}")
    return IdentitySides.of(lhs, rhs)


def thm2_sides(y: float, part: str) -> IdentitySides:
    """The sec-core identity of ``exp(+-i*asec y)``.

    Parts ``"A"`` and ``"C"`` hold on ``0 < |y| <= 1`` with sign ``+`` for
    ``y > 0``; part ``"B"`` holds on ``|y| >= 1`` with sign ``-`` for ``y >= 1``.
    """
    y = float(y)
    if part in ("A", "C"):
        if abs(y) > 1:
            raise DomainViolation(f"part {part} needs |y| <= 1")
        if abs(y) < SINGULAR_MARGIN:
            raise DomainViolation("y = 0 only holds by limit")
        sign = 1 if y > 0 else -1
    elif part == "B":
        if abs(y) < 1:
            raise DomainViolation("part B needs |y| >= 1")
        sign = -1 if y >= 1 else 1
    else:
        raise ValueError(f"unknown part {part!r}")
    lhs = cmath.exp(sign * 1j * asec(y))
    if part == "C":
        h = _tan(acos(y) / 2)
        rhs = (1 - h) / (1 + h)
    else:
        rhs = _tan(asin(y) / 2)
    return IdentitySides.of(lhs, rhs)


def bridge_sides(y: float) -> IdentitySides:
    """``exp(i*acos(i*y)) = i*(y + sqrt(y^2 + 1))`` for real ``y``."""
    y = float(y)
    lhs = cmath.exp(1j * acos(1j * y))
    rhs = 1j * (y + sqrt(y * y + 1))
    return IdentitySides.of(lhs, rhs)
