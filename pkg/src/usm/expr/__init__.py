"""Expression core: immutable normalized trees over exact constants."""

from usm.expr.core import (
    FUNCTION_TAGS,
    HALF,
    I,
    NEG_ONE,
    ONE,
    PI,
    ZERO,
    AbsoluteValue,
    Call,
    Constant,
    Expr,
    GaussianRational,
    ImaginaryUnit,
    Pi,
    Power,
    Product,
    Sum,
    Variable,
    abs_,
    add,
    as_expr,
    call,
    const,
    exp,
    free_symbols,
    ln,
    mul,
    pow_,
    sqrt,
    substitute,
    var,
    walk,
)
from usm.expr.calculus import UnsupportedDerivative, differentiate
from usm.expr.evaluate import (
    NonRealError,
    PoleError,
    UnboundVariableError,
    compile_expr,
    eval_complex,
    eval_real,
    real_function,
)
from usm.expr.interval import Interval
from usm.expr.parser import ParseError, as_gaussian, parse
from usm.expr.printer import to_string
from usm.expr.rational import NotRational, rational_to_expr, to_rational_function
from usm.expr.simplify import is_positive, simplify

__all__ = [name for name in dir() if not name.startswith("_")]
