"""Real intervals with extended-real endpoints."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Endpoint = Union[Fraction, float]


def _endpoint(v) -> Endpoint:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    v = float(v)
    return v


@dataclass(frozen=True)
class Interval:
    lo: Endpoint
    hi: Endpoint
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", _endpoint(self.lo))
        object.__setattr__(self, "hi", _endpoint(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")
        if math.isinf(self.lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi):
            object.__setattr__(self, "hi_closed", False)

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(lo, hi)

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-math.inf, math.inf)

    @property
    def is_bounded(self) -> bool:
        return not (math.isinf(self.lo) or math.isinf(self.hi))

    @property
    def width(self) -> float:
        return float(self.hi) - float(self.lo)

    def contains(self, x) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def contains_interior(self, x) -> bool:
        return self.lo < x < self.hi

    def subset_of(self, lo, hi) -> bool:
        """Is this interval inside the closed set ``[lo, hi]``?"""
        return self.lo >= lo and self.hi <= hi

    def split_at(self, points: Iterable) -> list["Interval"]:
        cuts = sorted({p for p in points if self.lo < p < self.hi})
        if not cuts:
            return [self]
        out = []
        edges = [self.lo, *cuts, self.hi]
        for k in range(len(edges) - 1):
            out.append(
                Interval(
                    edges[k],
                    edges[k + 1],
                    self.lo_closed if k == 0 else False,
                    self.hi_closed if k == len(edges) - 2 else False,
                )
            )
        return out

    def __str__(self) -> str:
        def fmt(v):
            if isinstance(v, float):
                if math.isinf(v):
                    return "inf" if v > 0 else "-inf"
                return repr(v)
            return str(v)

        return f"{'[' if self.lo_closed else '('}{fmt(self.lo)}, {fmt(self.hi)}{']' if self.hi_closed else ')'}"


def parse_interval(text: str) -> Interval:
    """Parse ``"(lo,hi)"`` / ``"[lo,hi]"`` with numeric, ``inf`` or ``pi`` endpoints."""
    from usm.expr.core import Constant, free_symbols
    from usm.expr.evaluate import eval_real
    from usm.expr.parser import parse

    s = text.strip()
    if len(s) < 5 or s[0] not in "([" or s[-1] not in ")]" or "," not in s:
        raise ValueError(f"bad interval literal {text!r}")
    body = s[1:-1]
    parts = body.split(",")
    if len(parts) != 2:
        raise ValueError(f"bad interval literal {text!r}")

    def endpoint(t: str):
        t = t.strip().lower()
        if t in ("inf", "+inf", "infinity", "oo"):
            return math.inf
        if t in ("-inf", "-infinity", "-oo"):
            return -math.inf
        e = parse(t)
        if free_symbols(e):
            raise ValueError(f"interval endpoint {t!r} is not a constant")
        if isinstance(e, Constant):
            return e.value
        return eval_real(e)

    lo, hi = endpoint(parts[0]), endpoint(parts[1])
    if not lo < hi:
        raise ValueError(f"interval {text!r} needs lo < hi")
    return Interval(lo, hi, s[0] == "[", s[-1] == "]")
