"""Unified substitution integration engine.

Quadratic-radical and half-angle integrands are mapped to rational
integrands in a single parameter, integrated exactly, back-substituted
piecewise and checked numerically.
"""

from usm.expr import Expr, parse, simplify, differentiate, eval_complex, eval_real
from usm.pipeline import IntegrationRequest, definite, integrate, verify_antiderivative

__all__ = [
    "Expr",
    "parse",
    "simplify",
    "differentiate",
    "eval_complex",
    "eval_real",
    "IntegrationRequest",
    "integrate",
    "definite",
    "verify_antiderivative",
]

__version__ = "0.1.0"
