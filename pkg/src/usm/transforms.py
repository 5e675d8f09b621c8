"""Template detection and the substitution maps.

Families of blocks, with ``y = (x + b)/a``:

* kinds 1/2 on ``|y| >= 1`` (parameter ``t``): ``tan(acsc(y)/2)``,
  ``tan(asec(y)/2)``, ``sqrt((x+b)^2 - a^2)``, ``sqrt((x+b-a)/(x+b+a))``;
* kind 3 on the whole line (parameter ``s``): ``sqrt((x+b)^2 + a^2)``;
* kinds 4/5 on ``|y| <= 1`` (parameter ``r``): ``tan(asin(y)/2)``,
  ``tan(acos(y)/2)``, ``sqrt(a^2 - (x+b)^2)``, ``sqrt((a+b+x)/(a-b-x))``;
* ``exp(acos(y))`` and ``exp(asin(y))`` on ``|y| <= 1`` through the kind-1
  map with the unimodular parameter ``t = y - i*sqrt(1 - y^2)``;
* ``sin``, ``cos``, ``tan``, ``sec``, ``csc`` of the variable itself through
  the half-angle parameter ``r = tan(w/2)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from usm.expr import (
    I,
    ONE,
    PI,
    AbsoluteValue,
    Call,
    Constant,
    Expr,
    GaussianRational,
    Interval,
    Power,
    Variable,
    add,
    call,
    free_symbols,
    mul,
    pow_,
    simplify,
    sqrt,
)
from usm.expr.rational import NotRational, rational_to_expr, to_rational_function
from usm.poly import RationalFunction


class NoTemplateError(ValueError):
    """No substitution template fits the integrand."""


class ConflictingTemplateError(NoTemplateError):
    """Blocks were found that need different substitutions."""


class UnmappedBlockError(NoTemplateError):
    """An x-dependent subexpression has no replacement under the plan."""


class DomainError(ValueError):
    """The domain does not fit one component of the chosen transform."""


class Branch(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"
    NOT_APPLICABLE = "n/a"


class Shape(enum.Enum):
    DIFFERENCE = "Difference"
    CIRCULAR = "Circular"
    SUM = "Sum"
    DEGENERATE = "Degenerate"


PARAM_NAMES = {0: None, 1: "t", 2: "t", 3: "s", 4: "r", 5: "r"}


# --------------------------------------------------------------------------
# quadratic classification


def exact_sqrt(v: Fraction) -> Optional[Fraction]:
    if v < 0:
        return None
    n, d = v.numerator, v.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class QuadraticForm:
    aprime: Fraction
    bprime: Fraction
    cprime: Fraction
    delta: Fraction
    shift: Fraction
    radius: Expr
    shape: Shape
    outer_coeff: Expr

    @property
    def radius_value(self) -> Optional[Fraction]:
        return self.radius.value if isinstance(self.radius, Constant) else None

    @property
    def radius_float(self) -> float:
        from usm.expr import eval_real

        return eval_real(self.radius)


def classify_quadratic(p, q, r) -> QuadraticForm:
    """Complete the square of ``p*x^2 + q*x + r`` and name its shape."""
    p, q, r = Fraction(p), Fraction(q), Fraction(r)
    if p == 0:
        raise ValueError("not a quadratic: leading coefficient is zero")
    delta = q * q - 4 * p * r
    shift = q / (2 * p)
    radius = mul(sqrt(Constant(abs(delta))), Constant(1 / (2 * abs(p))))
    if delta == 0:
        shape = Shape.DEGENERATE
    elif delta > 0:
        shape = Shape.DIFFERENCE if p > 0 else Shape.CIRCULAR
    else:
        if p < 0:
            raise ValueError("negative definite quadratic has no real square root")
        shape = Shape.SUM
    return QuadraticForm(p, q, r, delta, shift, radius, shape, sqrt(Constant(abs(p))))


# --------------------------------------------------------------------------
# plans and maps


@dataclass(frozen=True)
class TransformPlan:
    kind: int
    a: Fraction
    b: Fraction
    branch: Branch
    domain: Interval
    param_name: str
    # "usm" for the five transforms, "exp_acos" for the unimodular kind-1
    # route, "weierstrass", "direct" (already rational), "degenerate"
    route: str = "usm"
    # kind-0 degenerate route: sqrt(q) = outer * |x + shift|
    shift: Fraction = Fraction(0)
    outer: Optional[Expr] = None

    @property
    def family(self) -> str:
        if self.route != "usm":
            return self.route
        return {1: "hyp", 2: "hyp", 3: "sum", 4: "circ", 5: "circ"}[self.kind]

    @property
    def positive_params(self) -> frozenset[str]:
        """Parameter names known to be positive on the plan's domain."""
        if self.route == "usm" and self.kind == 3:
            return frozenset({self.param_name})
        if self.route == "usm" and self.branch is Branch.UPPER:
            return frozenset({self.param_name})
        return frozenset()


@dataclass
class SubstitutionMap:
    plan: TransformPlan
    x_of_param: Expr
    jacobian: Expr
    block_map: list[tuple[Expr, Expr]]
    backsub: list[tuple[Interval, Expr]]
    variable: str = "x"

    @property
    def param(self) -> Variable:
        return Variable(self.plan.param_name)


@dataclass(frozen=True)
class _Block:
    family: str
    tag: str
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)
    power: int = 1
    shift: Fraction = Fraction(0)
    shape: Optional[Shape] = None


def _linear(e: Expr, name: str) -> Optional[tuple[Fraction, Fraction]]:
    try:
        f = to_rational_function(e, name)
    except NotRational:
        return None
    if not f.den.is_one() or f.num.deg != 1:
        return None
    c0, c1 = f.num.c
    return c1, c0


def _half_tan_argument(node: Expr) -> Optional[Call]:
    # tan(g(L)/2) with g an inverse function
    if not (isinstance(node, Call) and node.tag == "tan"):
        return None
    arg = node.arg
    if (
        type(arg).__name__ == "Product"
        and len(arg.factors) == 2
        and arg.factors[0] == Constant(Fraction(1, 2))
        and isinstance(arg.factors[1], Call)
    ):
        return arg.factors[1]
    return None


_HALF_TAN = {"acsc": ("hyp", "tan_csc"), "asec": ("hyp", "tan_sec"), "asin": ("circ", "tan_sin"), "acos": ("circ", "tan_cos")}
_TRIG = ("sin", "cos", "tan", "sec", "csc")


def _match_block(node: Expr, name: str) -> Optional[_Block]:
    inner = _half_tan_argument(node)
    if inner is not None and inner.tag in _HALF_TAN:
        lin = _linear(inner.arg, name)
        if lin and lin[0] > 0:
            family, tag = _HALF_TAN[inner.tag]
            return _Block(family, tag, a=1 / lin[0], b=lin[1] / lin[0])
        return None
    if isinstance(node, Call) and node.tag == "exp" and isinstance(node.arg, Call) and node.arg.tag in ("acos", "asin"):
        lin = _linear(node.arg.arg, name)
        if lin and lin[0] > 0:
            return _Block("exp", "exp_" + node.arg.tag, a=1 / lin[0], b=lin[1] / lin[0])
        return None
    if isinstance(node, Call) and node.tag in _TRIG and node.arg == Variable(name):
        return _Block("weierstrass", node.tag)
    if isinstance(node, Power) and node.exponent.is_real and node.exponent.re.denominator == 2:
        m = node.exponent.re.numerator
        try:
            f = to_rational_function(node.base, name)
        except NotRational:
            return None
        if f.den.is_one() and f.num.deg == 2:
            c0, c1, c2 = f.num.c
            qf = classify_quadratic(c2, c1, c0)
            if qf.shape is Shape.DEGENERATE:
                return _Block("degenerate", "radical", scale=abs(c2), power=m, shift=qf.shift, shape=qf.shape)
            A = qf.radius_value
            if A is None:
                raise NoTemplateError(f"irrational radius in {node}; only rational completed squares are supported")
            family = {Shape.DIFFERENCE: "hyp", Shape.CIRCULAR: "circ", Shape.SUM: "sum"}[qf.shape]
            return _Block(family, "radical", a=A, b=qf.shift, scale=abs(c2), power=m, shape=qf.shape)
        if f.num.deg == 1 and f.den.deg == 1:
            # c * (x + n0) / (x + d0)
            n1, n0 = f.num.c[1], f.num.c[0] / f.num.c[1]
            d0 = f.den.c[0]
            c = n1
            if c > 0 and d0 > n0:
                return _Block("hyp", "ratio", a=(d0 - n0) / 2, b=(d0 + n0) / 2, scale=c, power=m)
            if c < 0 and n0 > d0:
                return _Block("circ", "ratio", a=(n0 - d0) / 2, b=(n0 + d0) / 2, scale=-c, power=m)
        return None
    return None


def _scan(e: Expr, name: str) -> tuple[list[_Block], list[Expr]]:
    blocks: list[_Block] = []
    foreign: list[Expr] = []

    def go(node: Expr):
        if name not in free_symbols(node):
            return
        blk = _match_block(node, name)
        if blk is not None:
            blocks.append(blk)
            return
        if isinstance(node, (Call, AbsoluteValue)):
            foreign.append(node)
            return
        if isinstance(node, Power) and not node.exponent.is_integer:
            go(node.base)
            return
        for a in node.args:
            go(a)

    go(e)
    return blocks, foreign


_FAMILY_KINDS = {"hyp": {1, 2}, "circ": {4, 5}, "sum": {3}, "exp": {1, 2}}


def _component_branch(domain: Interval, a: Fraction, b: Fraction) -> Branch:
    if domain.lo >= a - b:
        return Branch.UPPER
    if domain.hi <= -a - b:
        return Branch.LOWER
    raise DomainError(
        f"domain {domain} is not inside one component |x + {b}| >= {a}; split it at x = {-a - b} and x = {a - b}"
    )


def _inside_branch(domain: Interval, a: Fraction, b: Fraction) -> Branch:
    if not domain.subset_of(-a - b, a - b):
        raise DomainError(f"domain {domain} is not inside |x + {b}| <= {a}")
    if domain.lo >= -b:
        return Branch.UPPER
    if domain.hi <= -b:
        return Branch.LOWER
    return Branch.NOT_APPLICABLE


def detect_template(
    e: Expr,
    var: str,
    domain: Interval,
    transform: str | int = "auto",
    branch: str = "auto",
) -> TransformPlan:
    """Choose a transform for ``e`` on ``domain``.

    ``transform`` is ``"auto"``, a kind ``1..5`` or ``"weierstrass"``;
    ``branch`` is ``"auto"``, ``"upper"`` or ``"lower"``.
    """
    blocks, foreign = _scan(e, var)
    families = {blk.family for blk in blocks}
    if foreign:
        raise NoTemplateError(f"no template covers {foreign[0]}")
    if transform == "weierstrass" and families - {"weierstrass"}:
        raise NoTemplateError("the Weierstrass route needs an integrand rational in sin and cos of the variable")
    if not blocks or families == {"weierstrass"} and transform not in ("auto", "weierstrass"):
        if transform not in ("auto",) and not blocks:
            raise NoTemplateError("no substitution block found for the requested transform")
        try:
            to_rational_function(e, var)
        except NotRational:
            raise NoTemplateError(f"no template found in {e}") from None
        return TransformPlan(0, Fraction(1), Fraction(0), Branch.NOT_APPLICABLE, domain, var, route="direct")
    if "exp" in families:
        extra = {(blk.family, blk.tag) for blk in blocks if blk.family != "exp"}
        if extra - {("circ", "radical")}:
            raise ConflictingTemplateError("exp(acos) blocks mix with incompatible blocks")
        families = {"exp"}
    if len(families) > 1:
        raise ConflictingTemplateError(f"blocks need different transforms: {sorted(families)}")
    (family,) = families
    if family == "weierstrass":
        if not domain.subset_of(-math.pi, math.pi):
            raise DomainError("the half-angle parameter needs the domain inside (-pi, pi)")
        return TransformPlan(5, Fraction(1), Fraction(0), Branch.NOT_APPLICABLE, domain, "r", route="weierstrass")
    if family == "degenerate":
        shifts = {blk.shift for blk in blocks}
        if len(shifts) > 1:
            raise ConflictingTemplateError("degenerate radicals with different centres")
        (shift,) = shifts
        if domain.lo >= -shift:
            br = Branch.UPPER
        elif domain.hi <= -shift:
            br = Branch.LOWER
        else:
            raise DomainError(f"domain {domain} straddles x = {-shift}; split it there")
        return TransformPlan(0, Fraction(1), Fraction(0), br, domain, var, route="degenerate", shift=shift)
    params = {(blk.a, blk.b) for blk in blocks}
    if len(params) > 1:
        raise ConflictingTemplateError(f"blocks need different (a, b): {sorted(params)}")
    ((a, b),) = params

    if family in ("hyp", "exp"):
        kind = 2 if any(blk.tag in ("radical", "ratio") for blk in blocks) else 1
    elif family == "circ":
        kind = 5 if any(blk.tag in ("radical", "ratio") for blk in blocks) else 4
    else:
        kind = 3
    if transform not in ("auto", None):
        if transform == "weierstrass" or int(transform) not in _FAMILY_KINDS[family]:
            raise NoTemplateError(f"transform {transform} does not fit the blocks found (kinds {sorted(_FAMILY_KINDS[family])})")
        kind = int(transform)

    if family == "hyp":
        br = _component_branch(domain, a, b)
        route = "usm"
    elif family == "circ":
        br = _inside_branch(domain, a, b)
        route = "usm"
    elif family == "exp":
        _inside_branch(domain, a, b)
        br = Branch.NOT_APPLICABLE
        kind = 1
        route = "exp_acos"
    else:
        br = Branch.NOT_APPLICABLE
        route = "usm"
    if branch not in ("auto", None):
        want = Branch(branch)
        if family in ("hyp", "circ") and br is not Branch.NOT_APPLICABLE and want is not br:
            raise DomainError(f"branch {branch} does not match the domain {domain} (needs {br.value})")
        if family in ("sum", "exp"):
            raise DomainError(f"branch selection does not apply to kind {kind}")
    return TransformPlan(kind, a, b, br, domain, PARAM_NAMES[kind], route=route)


# --------------------------------------------------------------------------
# building maps


def _rf_expr(rf: RationalFunction, p: Variable) -> Expr:
    return rational_to_expr(rf, p)


def build_substitution(plan: TransformPlan, variable: str = "x") -> SubstitutionMap:
    a, b = plan.a, plan.b
    xv = Variable(variable)
    y = mul(add(xv, b), 1 / a)
    T = RationalFunction.x()
    if plan.route in ("direct", "degenerate"):
        return SubstitutionMap(plan, xv, ONE, [], [(plan.domain, xv)], variable)
    p = Variable(plan.param_name)
    one_minus = _rf_expr((1 - T) / (1 + T), p)
    one_plus = _rf_expr((1 + T) / (1 - T), p)
    quad_m = add(pow_(add(xv, b), 2), -a * a)
    quad_p = add(pow_(add(xv, b), 2), a * a)
    quad_c = add(a * a, mul(-1, pow_(add(xv, b), 2)))
    quad_m, quad_p, quad_c = (simplify(q) for q in (quad_m, quad_p, quad_c))
    if plan.route == "weierstrass":
        w = Variable(variable)
        sin_r = _rf_expr(2 * T / (1 + T * T), p)
        cos_r = _rf_expr((1 - T * T) / (1 + T * T), p)
        blocks = [
            (call("sin", w), sin_r),
            (call("cos", w), cos_r),
            (call("tan", w), _rf_expr(2 * T / (1 - T * T), p)),
            (call("sec", w), _rf_expr((1 + T * T) / (1 - T * T), p)),
            (call("csc", w), _rf_expr((1 + T * T) / (2 * T), p)),
        ]
        return SubstitutionMap(
            plan,
            mul(2, call("atan", p)),
            _rf_expr(2 / (1 + T * T), p),
            blocks,
            [(plan.domain, call("tan", mul(Fraction(1, 2), w)))],
            variable,
        )
    if plan.kind in (1, 2):
        x_of = _rf_expr(a * (T * T + 1) / (2 * T) - b, p)
        jac = _rf_expr(a * (T * T - 1) / (2 * T * T), p)
        if plan.route == "exp_acos":
            blocks = [
                (call("exp", call("acos", y)), pow_(p, GaussianRational(0, 1))),
                (call("exp", call("asin", y)), mul(call("exp", mul(PI, Fraction(1, 2))), pow_(p, GaussianRational(0, -1)))),
                (sqrt(quad_c), mul(I, _rf_expr(a * (T * T - 1) / (2 * T), p))),
            ]
            back = mul(add(xv, b, mul(-1, I, sqrt(quad_c))), 1 / a)
            return SubstitutionMap(plan, x_of, jac, blocks, [(plan.domain, simplify(back))], variable)
        sign = -1 if plan.branch is Branch.UPPER else 1
        blocks = [
            (call("tan", mul(Fraction(1, 2), call("acsc", y))), p),
            (call("tan", mul(Fraction(1, 2), call("asec", y))), one_minus),
            (sqrt(quad_m), _rf_expr(sign * a * (T * T - 1) / (2 * T), p)),
            (sqrt(mul(add(xv, b - a), pow_(add(xv, b + a), -1))), one_minus),
        ]
        back = mul(add(xv, b, mul(sign, sqrt(quad_m))), 1 / a)
        return SubstitutionMap(plan, x_of, jac, blocks, [(plan.domain, back)], variable)
    if plan.kind == 3:
        x_of = _rf_expr(a * (T * T - 1) / (2 * T) - b, p)
        jac = _rf_expr(a * (T * T + 1) / (2 * T * T), p)
        blocks = [(sqrt(quad_p), _rf_expr(a * (T * T + 1) / (2 * T), p))]
        back = mul(add(xv, b, sqrt(quad_p)), 1 / a)
        return SubstitutionMap(plan, x_of, jac, blocks, [(plan.domain, back)], variable)
    if plan.kind in (4, 5):
        x_of = _rf_expr(2 * a * T / (1 + T * T) - b, p)
        jac = _rf_expr(2 * a * (1 - T * T) / ((1 + T * T) ** 2), p)
        blocks = [
            (call("tan", mul(Fraction(1, 2), call("asin", y))), p),
            (call("tan", mul(Fraction(1, 2), call("acos", y))), one_minus),
            (sqrt(quad_c), _rf_expr(a * (1 - T * T) / (1 + T * T), p)),
            (sqrt(mul(add(xv, a + b), pow_(add(mul(-1, xv), a - b), -1))), one_plus),
        ]
        back = mul(add(xv, b), pow_(add(a, sqrt(quad_c)), -1))
        return SubstitutionMap(plan, x_of, jac, blocks, [(plan.domain, back)], variable)
    raise ValueError(f"unknown transform kind {plan.kind}")


# --------------------------------------------------------------------------
# applying maps


def _block_replacement(blk: _Block, smap: SubstitutionMap) -> Expr:
    plan = smap.plan
    p = smap.param
    T = RationalFunction.x()
    a = plan.a
    root_scale = sqrt(Constant(blk.scale))
    if blk.family == "degenerate":
        if plan.route != "degenerate" or blk.shift != plan.shift:
            raise UnmappedBlockError("degenerate radical does not match the plan")
        sign = 1 if plan.branch is Branch.UPPER else -1
        return pow_(mul(sign, root_scale, add(Variable(smap.variable), blk.shift)), blk.power)
    if blk.family == "weierstrass":
        if plan.route != "weierstrass":
            raise UnmappedBlockError(f"{blk.tag} of the variable needs the half-angle parameter")
        table = {
            "sin": 2 * T / (1 + T * T),
            "cos": (1 - T * T) / (1 + T * T),
            "tan": 2 * T / (1 - T * T),
            "sec": (1 + T * T) / (1 - T * T),
            "csc": (1 + T * T) / (2 * T),
        }
        return _rf_expr(table[blk.tag], p)
    if (blk.a, blk.b) != (plan.a, plan.b):
        raise UnmappedBlockError(f"block with (a, b) = ({blk.a}, {blk.b}) does not match the plan")
    fam = plan.family
    if fam == "exp_acos":
        if blk.tag == "exp_acos":
            return pow_(p, GaussianRational(0, 1))
        if blk.tag == "exp_asin":
            return mul(call("exp", mul(PI, Fraction(1, 2))), pow_(p, GaussianRational(0, -1)))
        if blk.family == "circ" and blk.tag == "radical":
            return pow_(mul(root_scale, I, _rf_expr(a * (T * T - 1) / (2 * T), p)), blk.power)
    elif fam == "hyp" and blk.family == "hyp":
        sign = -1 if plan.branch is Branch.UPPER else 1
        rf = {
            "tan_csc": T,
            "tan_sec": (1 - T) / (1 + T),
            "radical": sign * a * (T * T - 1) / (2 * T),
            "ratio": (1 - T) / (1 + T),
        }[blk.tag]
        base = _rf_expr(rf, p)
        if blk.tag in ("radical", "ratio"):
            return pow_(mul(root_scale, base), blk.power)
        return base
    elif fam == "circ" and blk.family == "circ":
        rf = {
            "tan_sin": T,
            "tan_cos": (1 - T) / (1 + T),
            "radical": a * (1 - T * T) / (1 + T * T),
            "ratio": (1 + T) / (1 - T),
        }[blk.tag]
        base = _rf_expr(rf, p)
        if blk.tag in ("radical", "ratio"):
            return pow_(mul(root_scale, base), blk.power)
        return base
    elif fam == "sum" and blk.family == "sum":
        return pow_(mul(root_scale, _rf_expr(a * (T * T + 1) / (2 * T), p)), blk.power)
    raise UnmappedBlockError(f"{blk.tag} block has no replacement under kind {plan.kind} ({plan.route})")


def apply_substitution(e: Expr, smap: SubstitutionMap) -> Expr:
    """Rewrite ``e dx`` as an integrand in the plan's parameter."""
    name = smap.variable
    memo: dict[Expr, Expr] = {}

    def go(node: Expr) -> Expr:
        if name not in free_symbols(node):
            return node
        hit = memo.get(node)
        if hit is not None:
            return hit
        blk = _match_block(node, name)
        if blk is not None:
            out = _block_replacement(blk, smap)
        elif isinstance(node, Variable):
            out = smap.x_of_param
        elif isinstance(node, Power) and not node.exponent.is_integer:
            out = pow_(go(node.base), node.exponent)
        elif isinstance(node, (Call, AbsoluteValue)):
            raise UnmappedBlockError(f"no replacement for {node} under kind {smap.plan.kind} ({smap.plan.route})")
        else:
            from usm.expr.core import rebuild

            out = rebuild(node, tuple(go(a) for a in node.args))
        memo[node] = out
        return out

    replaced = mul(go(e), smap.jacobian)
    return simplify(replaced, smap.plan.positive_params)


def weierstrass_reduce(integrand: Expr, variable: str = "w", domain: Optional[Interval] = None) -> tuple[Expr, SubstitutionMap]:
    """Half-angle reduction of an integrand rational in trig functions of ``variable``."""
    domain = domain or Interval(-math.pi, math.pi)
    plan = detect_template(integrand, variable, domain, transform="weierstrass")
    if plan.route not in ("weierstrass", "direct"):
        raise NoTemplateError("integrand is not rational in trig functions of the variable")
    smap = build_substitution(plan, variable)
    return apply_substitution(integrand, smap), smap


# --------------------------------------------------------------------------
# Euler substitution parameters


@dataclass(frozen=True)
class EulerParameters:
    x: Fraction | float
    shape: Shape
    X: Fraction | float
    S: Fraction | float
    u_plus: Optional[Fraction | float] = None
    u_minus: Optional[Fraction | float] = None
    t_usm: Optional[Fraction | float] = None
    t_euler: Optional[Fraction | float] = None
    r_usm: Optional[Fraction | float] = None
    exact: bool = False


CIRCULAR_AXIS_GUARD = 1e-9


def euler_parameters(q: QuadraticForm, x) -> EulerParameters:
    """Euler substitution parameters beside the matching transform parameter.

    For Difference shapes ``U+- = X +- S`` and ``{U+, U-} = {A t, A/t}``;
    for Circular shapes ``t_E = (C - A)/X = -r``.  Exact when ``x`` and the
    square root are rational.
    """
    A = q.radius_value
    if isinstance(x, (int, Fraction)) and A is not None:
        X = Fraction(x) + q.shift
        inner = X * X - A * A if q.shape is Shape.DIFFERENCE else A * A - X * X
        S = exact_sqrt(inner) if q.shape in (Shape.DIFFERENCE, Shape.CIRCULAR) else None
        exact = S is not None
    else:
        exact = False
    if not exact:
        A = q.radius_float
        X = float(x) + float(q.shift)
        inner = X * X - A * A if q.shape is Shape.DIFFERENCE else A * A - X * X
        if inner < 0:
            raise DomainError(f"x = {x} is outside the real domain of the {q.shape.value} radical")
        S = math.sqrt(inner)
    if q.shape is Shape.DIFFERENCE:
        if inner < 0:
            raise DomainError(f"x = {x} is outside the real domain of the Difference radical")
        # Upper component when X > 0, Lower otherwise
        sign = -1 if X > 0 else 1
        t = (X + sign * S) / A
        return EulerParameters(x, q.shape, X, S, u_plus=X + S, u_minus=X - S, t_usm=t, exact=exact)
    if q.shape is Shape.CIRCULAR:
        if inner < 0:
            raise DomainError(f"x = {x} is outside the real domain of the Circular radical")
        if abs(float(X)) < CIRCULAR_AXIS_GUARD:
            raise DomainError("Euler parameter (C - A)/X is undefined at X = 0")
        t_e = (S - A) / X
        r = X / (A + S)
        return EulerParameters(x, q.shape, X, S, t_euler=t_e, r_usm=r, exact=exact)
    raise ValueError(f"Euler parameters are defined for Difference and Circular shapes, not {q.shape.value}")
