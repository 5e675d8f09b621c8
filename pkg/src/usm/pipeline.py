"""detect -> transform -> integrate -> back-substitute -> verify."""

from __future__ import annotations

import dataclasses
import math
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from usm.backsub import Antiderivative, _param_at, back_substitute
from usm.expr import (
    ONE,
    Call,
    Expr,
    Interval,
    Variable,
    add,
    call,
    compile_expr,
    differentiate,
    free_symbols,
    mul,
    parse,
    pow_,
    simplify,
    substitute,
    to_string,
    walk,
)
from usm.expr.evaluate import NonRealError, PoleError
from usm.expr.rational import NotRational, to_rational_function
from usm.ratint import (
    ArctanTerm,
    ChainTerm,
    LogAbsTerm,
    ParamAntiderivative,
    PowerTerm,
    RationalTerm,
    integrate_expression,
)
from usm.transforms import (
    DomainError,
    NoTemplateError,
    SubstitutionMap,
    TransformPlan,
    apply_substitution,
    build_substitution,
    detect_template,
)

DEFAULT_POINTS = 64
REL_TOL = 1e-7
_EVAL_ERRORS = (ZeroDivisionError, ValueError, OverflowError, PoleError, NonRealError)


class UnintegrableRemainder(ArithmeticError):
    """Part of the integrand survived every integration path."""

    def __init__(self, message: str, remainder: Optional[Expr] = None):
        super().__init__(message)
        self.remainder = remainder


class DivergentIntegral(ArithmeticError):
    """A definite integral has no finite value (or no supported limit)."""


@dataclass(frozen=True)
class Presubstitution:
    """``variable = forward(x)`` with inverse ``x = inverse(variable)`` on the domain."""

    variable: str
    forward: Expr
    inverse: Expr


@dataclass
class IntegrationRequest:
    integrand: Expr
    variable: str = "x"
    domain: Interval = field(default_factory=Interval.real_line)
    transform_choice: str | int = "auto"
    branch_choice: str = "auto"
    max_chain_depth: int = 2
    verify: bool = True
    presubstitution: Optional[Presubstitution] = None
    n_points: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.integrand, str):
            self.integrand = parse(self.integrand)
        if not 1 <= self.max_chain_depth <= 3:
            raise ValueError("max_chain_depth must be in [1, 3]")
        if not self.domain.lo < self.domain.hi:
            raise ValueError("empty domain")


@dataclass
class VerificationReport:
    points: list[tuple[float, float, float, float]]
    max_rel_err: float
    passed: bool
    skipped_margin: float
    n_points: int
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.passed


@dataclass
class IntegrationResult:
    request: IntegrationRequest
    plan: TransformPlan
    substitution: SubstitutionMap
    transformed_integrand: Expr
    param_antiderivative: ParamAntiderivative
    antiderivative: Antiderivative
    verification: Optional[VerificationReport]
    chain: list["IntegrationResult"] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verification is None or self.verification.passed


# --------------------------------------------------------------------------
# verification


def _window(iv: Interval) -> tuple[float, float]:
    lo, hi = float(iv.lo), float(iv.hi)
    if math.isinf(lo) and math.isinf(hi):
        return -10.0, 10.0
    if math.isinf(hi):
        return lo, lo + max(8.0, 4 * abs(lo))
    if math.isinf(lo):
        return hi - max(8.0, 4 * abs(hi)), hi
    return lo, hi


def _margin(width: float, endpoint: float) -> float:
    # radicals and poles make derivatives blow up at piece ends; keep away
    return min(0.25 * width, max(1e-4, 1e-3 * width, 0.05 * max(1.0, abs(endpoint))))


def chebyshev_points(iv: Interval, n: int) -> tuple[list[float], float]:
    lo, hi = _window(iv)
    w = hi - lo
    m_lo, m_hi = _margin(w, lo), _margin(w, hi)
    a, b = lo + m_lo, hi - m_hi
    mid, half = (a + b) / 2, (b - a) / 2
    return [mid + half * math.cos((2 * k + 1) * math.pi / (2 * n)) for k in range(n)], min(m_lo, m_hi)


def _real(fn, name: str, x: float) -> float:
    v = fn({name: x})
    if abs(v.imag) > 1e-9 * (1 + abs(v.real)):
        raise NonRealError(f"value {v} at {name} = {x} is not real")
    return v.real


def _piece_rows(f_fn, F_fn, name: str, xs: list[float], precise: bool):
    # at 40 digits roundoff is negligible, so shrink h to kill truncation error
    eps_h = 1e-12 if precise else 2.220446049250313e-16 ** (1 / 3)
    rows = []
    for x in xs:
        h = eps_h * max(1.0, abs(x))
        xp, xm = x + h, x - h
        if precise:
            hi, lo = F_fn({name: xp}), F_fn({name: xm})
            got = complex((hi - lo) / (xp - xm))
            val = complex(f_fn({name: x}))
            if abs(got.imag) > 1e-9 * (1 + abs(got.real)) or abs(val.imag) > 1e-9 * (1 + abs(val.real)):
                raise NonRealError(f"non-real value at {name} = {x}")
            rows.append((x, val.real, got.real))
        else:
            got = (_real(F_fn, name, xp) - _real(F_fn, name, xm)) / (xp - xm)
            rows.append((x, _real(f_fn, name, x), got))
    return rows


def _errors(rows) -> list[float]:
    scale = max(abs(r[1]) for r in rows)
    out = []
    for _, expected, got in rows:
        if scale == 0:
            out.append(abs(got) if abs(got) > 1e-9 else 0.0)
        else:
            out.append(abs(got - expected) / max(abs(expected), 1e-6 * scale))
    return out


def verify_antiderivative(
    f: Expr, F: Antiderivative, n_points: Optional[int] = None, variable: Optional[str] = None
) -> VerificationReport:
    """Central-difference check of ``F' = f`` at Chebyshev points of every piece.

    Pieces that fail in double precision are re-evaluated in extended
    precision, since antiderivatives with large cancelling terms lose more
    digits to roundoff than the step ``h`` can tolerate.
    """
    import mpmath

    n = n_points or int(os.environ.get("USM_VERIFY_POINTS", DEFAULT_POINTS))
    if n < 8:
        raise ValueError("verification needs at least 8 points")
    name = variable or F.variable
    f_fn = compile_expr(f)
    points: list[tuple[float, float, float, float]] = []
    worst, margin = 0.0, math.inf
    failure = None
    for iv, piece in F.pieces:
        xs, m = chebyshev_points(iv, n)
        margin = min(margin, m)
        try:
            rows = _piece_rows(f_fn, compile_expr(piece), name, xs, False)
            errs = _errors(rows)
        except _EVAL_ERRORS:
            errs = [math.inf]
        if max(errs) > REL_TOL:
            try:
                with mpmath.workdps(40):
                    rows = _piece_rows(compile_expr(f, True), compile_expr(piece, True), name, xs, True)
                errs = _errors(rows)
            except _EVAL_ERRORS as exc:
                failure = f"piece {iv}: {exc}"
                worst = math.inf
                continue
        for (x, expected, got), err in zip(rows, errs):
            points.append((x, expected, got, err))
            worst = max(worst, err)
    return VerificationReport(points, worst, worst <= REL_TOL and failure is None, margin, n, failure)


# --------------------------------------------------------------------------
# integration


def _fresh(name: str, taken: set[str]) -> str:
    if name not in taken:
        return name
    k = 1
    while f"{name}{k}" in taken:
        k += 1
    return f"{name}{k}"


def _param_domain(smap: SubstitutionMap, domain: Interval) -> Optional[Interval]:
    pexpr = smap.backsub[0][1]
    lo, hi = _param_at(smap, pexpr, domain.lo), _param_at(smap, pexpr, domain.hi)
    if math.isnan(lo) or math.isnan(hi) or lo == hi:
        return None
    return Interval(min(lo, hi), max(lo, hi))


def _image(g: Expr, name: str, v) -> float:
    fn = compile_expr(g)
    if isinstance(v, float) and math.isinf(v):
        near, far = fn({name: math.copysign(1e6, v)}).real, fn({name: math.copysign(1e12, v)}).real
        if abs(far) > 10 * abs(near) and abs(far) > 1e2:
            return math.copysign(math.inf, far)
        return far
    return fn({name: float(v)}).real


def _integrate_presub(req: IntegrationRequest) -> IntegrationResult:
    ps = req.presubstitution
    x = req.variable
    u_integrand = simplify(mul(substitute(req.integrand, {x: ps.inverse}), differentiate(ps.inverse, ps.variable)))
    a, b = _image(ps.forward, x, req.domain.lo), _image(ps.forward, x, req.domain.hi)
    u_dom = Interval(min(a, b), max(a, b))
    inner = integrate(
        dataclasses.replace(req, integrand=u_integrand, variable=ps.variable, domain=u_dom, presubstitution=None, verify=False)
    )
    pieces = []
    for iv, e in inner.antiderivative.pieces:
        lo, hi = _image(ps.inverse, ps.variable, iv.lo), _image(ps.inverse, ps.variable, iv.hi)
        lo, hi = max(min(lo, hi), float(req.domain.lo)), min(max(lo, hi), float(req.domain.hi))
        pieces.append((Interval(lo, hi), substitute(e, {ps.variable: ps.forward})))
    F = Antiderivative(pieces, x)
    report = verify_antiderivative(req.integrand, F, req.n_points, x) if req.verify else None
    return IntegrationResult(
        req, inner.plan, inner.substitution, inner.transformed_integrand, inner.param_antiderivative, F, report, [inner]
    )


def integrate(req: IntegrationRequest) -> IntegrationResult:
    """Antiderivative of ``req.integrand`` on ``req.domain``.

    Raises NoTemplateError, DomainError or UnintegrableRemainder; a failed
    verification is reported in the result, not raised.
    """
    if req.presubstitution is not None:
        return _integrate_presub(req)
    plan = detect_template(req.integrand, req.variable, req.domain, req.transform_choice, req.branch_choice)
    taken = set(free_symbols(req.integrand)) | {req.variable}
    if plan.route not in ("direct", "degenerate") and plan.param_name in taken:
        plan = dataclasses.replace(plan, param_name=_fresh(plan.param_name, taken))
    smap = build_substitution(plan, req.variable)
    g = apply_substitution(req.integrand, smap)
    pa = integrate_expression(g, plan.param_name)
    chain: list[IntegrationResult] = []
    if pa.remainder is not None and req.max_chain_depth > 1 and plan.route not in ("direct", "degenerate"):
        pdom = _param_domain(smap, req.domain)
        if pdom is not None:
            try:
                inner = integrate(
                    IntegrationRequest(
                        pa.remainder, plan.param_name, pdom, max_chain_depth=req.max_chain_depth - 1, verify=False
                    )
                )
            except (NoTemplateError, DomainError, UnintegrableRemainder):
                inner = None
            if inner is not None:
                pa.terms.append(ChainTerm(ONE, tuple(inner.antiderivative.pieces), inner))
                pa.remainder = None
                chain.append(inner)
    if pa.remainder is not None:
        raise UnintegrableRemainder(f"unintegrable remainder: {to_string(pa.remainder)}", pa.remainder)
    F = back_substitute(pa, smap)
    report = verify_antiderivative(req.integrand, F, req.n_points, req.variable) if req.verify else None
    return IntegrationResult(req, plan, smap, g, pa, F, report, chain)


# --------------------------------------------------------------------------
# definite integrals


def _eval_param(expr: Expr, name: str, v: float) -> float:
    z = compile_expr(expr)({name: v})
    if abs(z.imag) > 1e-9 * (1 + abs(z.real)):
        raise DivergentIntegral(f"non-real value at {name} = {v}")
    return z.real


def _rational_arg(arg: Expr, name: str):
    try:
        return to_rational_function(arg, name)
    except NotRational:
        return None


def _limit(pa: ParamAntiderivative, L: float) -> float:
    """Termwise limit of the parameter antiderivative at 0 or +-inf."""
    name = pa.param
    at_inf = math.isinf(L)
    log_coeff = 0.0
    total = 0.0
    for t in pa.terms:
        if isinstance(t, PowerTerm):
            c = _eval_param(t.coeff, name, 1.0)
            re = float(t.exponent.re)
            base_at_zero = t.base == Variable(name)
            if at_inf or base_at_zero:
                if (re < 0) == at_inf or re == 0 and not t.exponent.im:
                    total += 0.0 if re != 0 else c
                    continue
                raise DivergentIntegral(f"term {to_string(t.to_expr())} diverges at {name} -> {L}")
            total += _eval_param(t.to_expr(), name, 0.0)
        elif isinstance(t, LogAbsTerm):
            c = _eval_param(t.coeff, name, 1.0)
            rf = _rational_arg(t.arg, name)
            if rf is None:
                if at_inf:
                    raise DivergentIntegral("no analytic limit for a non-rational logarithm at infinity")
                total += _eval_param(t.to_expr(), name, 0.0)
                continue
            if at_inf:
                log_coeff += c * (rf.num.deg - rf.den.deg)
                total += c * math.log(abs(float(rf.num.lc / rf.den.lc)))
            else:
                m = rf.num.trailing_order() - rf.den.trailing_order()
                log_coeff += c * m
                n0 = rf.num.shift_down(rf.num.trailing_order())
                d0 = rf.den.shift_down(rf.den.trailing_order())
                total += c * math.log(abs(float(n0.c[0] / d0.c[0])))
        elif isinstance(t, ArctanTerm):
            c = _eval_param(t.coeff, name, 1.0)
            if at_inf:
                rf = _rational_arg(t.arg, name)
                slope = float(rf.num.lc / rf.den.lc) if rf is not None else _eval_param(t.arg, name, 1.0) - _eval_param(t.arg, name, 0.0)
                total += c * math.copysign(math.pi / 2, slope * L)
            else:
                total += _eval_param(t.to_expr(), name, 0.0)
        elif isinstance(t, RationalTerm):
            c = _eval_param(t.coeff, name, 1.0)
            f = t.f
            if at_inf:
                if f.num.deg > f.den.deg:
                    raise DivergentIntegral("rational term diverges at infinity")
                total += c * (float(f.num.lc) if f.num.deg == f.den.deg else 0.0)
            else:
                if f.den.c[0] == 0:
                    raise DivergentIntegral("rational term has a pole at 0")
                total += c * float(f.num.c[0] / f.den.c[0]) if f.num.c else 0.0
        else:
            if at_inf:
                raise DivergentIntegral(f"no analytic limit for {type(t).__name__} at infinity")
            total += _eval_param(t.to_expr(), name, 0.0)
    if abs(log_coeff) > 1e-12:
        raise DivergentIntegral(f"logarithmic divergence at {name} -> {L}")
    return total


def _pa_value(pa: ParamAntiderivative, P: float) -> float:
    if math.isinf(P) or P == 0.0:
        return _limit(pa, P)
    try:
        return _eval_param(pa.to_expr(), pa.param, P)
    except _EVAL_ERRORS as exc:
        raise DivergentIntegral(f"antiderivative is singular at {pa.param} = {P}") from exc


def definite(req: IntegrationRequest, lower, upper) -> float:
    """Definite integral over ``(lower, upper)`` through parameter-space limits."""
    lower, upper = (float(lower) if isinstance(lower, float) else Fraction(lower)), (
        float(upper) if isinstance(upper, float) else Fraction(upper)
    )
    sign = 1.0
    if lower > upper:
        lower, upper, sign = upper, lower, -1.0
    res = integrate(dataclasses.replace(req, domain=Interval(lower, upper)))
    F = res.antiderivative
    if len(F.pieces) > 1:
        raise DivergentIntegral("the integrand has a non-integrable singularity inside the interval")
    smap = res.substitution
    pa = res.param_antiderivative
    direct = res.request.presubstitution is None and smap.plan.route not in ("direct", "degenerate")
    if direct and smap.plan.route != "exp_acos":
        pexpr = smap.backsub[0][1]
        P_lo, P_hi = _param_at(smap, pexpr, lower), _param_at(smap, pexpr, upper)
        if not (math.isnan(P_lo) or math.isnan(P_hi)):
            return sign * (_pa_value(pa, P_hi) - _pa_value(pa, P_lo))
    if smap.plan.route in ("direct", "degenerate") and res.request.presubstitution is None:
        return sign * (_pa_value(pa, float(upper)) - _pa_value(pa, float(lower)))
    if math.isinf(lower) or math.isinf(upper):
        raise DivergentIntegral("infinite limits need an analytic parameter limit")
    piece = F.pieces[0][1]
    fn = compile_expr(piece)
    return sign * (_real(fn, F.variable, float(upper)) - _real(fn, F.variable, float(lower)))


# --------------------------------------------------------------------------
# self-verification corpus


_A_CHOICES = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))
_B_CHOICES = tuple(Fraction(k, 2) for k in range(-4, 5))
_C_CHOICES = (Fraction(-1, 2), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(-2), Fraction(3))


def corpus_integrand(rng: random.Random) -> tuple[Expr, Fraction, Fraction]:
    """Random ``P(x, T1, T2) / Q(x, T1, T2)`` with the half-angle blocks."""
    a, b = rng.choice(_A_CHOICES), rng.choice(_B_CHOICES)
    x = Variable("x")
    y = mul(add(x, b), 1 / a)
    T1 = call("tan", mul(Fraction(1, 2), call("acsc", y)))
    T2 = call("tan", mul(Fraction(1, 2), call("asec", y)))
    atoms = [x, T1, T2]
    deg = rng.randint(0, 3)
    powers = [0, 0, 0]
    for _ in range(deg):
        powers[rng.randrange(3)] += 1
    if deg and powers[0] == deg and rng.random() < 0.7:
        # keep pure polynomials rare; they never touch a block
        powers[0] -= 1
        powers[1 + rng.randrange(2)] += 1
    num = mul(rng.choice((1, 2, 3, -1, -2)), *(mul(*[atoms[i]] * k) if k else ONE for i, k in enumerate(powers)))
    den_atoms = [
        lambda: add(x, rng.choice(_C_CHOICES)),
        lambda: add(T1, rng.choice(_C_CHOICES)),
        lambda: add(T2, rng.choice(_C_CHOICES)),
        lambda: add(T1, mul(-1, T2)),
        lambda: add(T1, T2),
    ]
    n_den = rng.choice((0, 1, 1, 2))
    den = mul(*(rng.choice(den_atoms)() for _ in range(n_den)))
    e = mul(num, pow_(den, -1))
    if not any(isinstance(node, Call) for node in walk(e)):
        e = mul(e, T1)
    return e, a, b


def _corpus_component(e: Expr, dom: Interval, n_points: Optional[int]) -> dict:
    t0 = time.perf_counter()
    out = {"domain": str(dom)}
    try:
        res = integrate(IntegrationRequest(e, "x", dom, n_points=n_points))
        out.update(
            status="pass" if res.verification.passed else "fail",
            max_rel_err=res.verification.max_rel_err,
            pieces=len(res.antiderivative.pieces),
            antiderivative=[to_string(p) for _, p in res.antiderivative.pieces],
        )
        if res.verification.failure:
            out["message"] = res.verification.failure
    except UnintegrableRemainder as exc:
        out.update(status="remainder", message=str(exc))
    except (NoTemplateError, DomainError) as exc:
        out.update(status="error", message=str(exc))
    out["seconds"] = time.perf_counter() - t0
    return out


def run_corpus(seed: int, count: int, n_points: Optional[int] = None) -> dict:
    """Generate ``count`` integrands and integrate each on both components."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    entries = []
    totals = {"pass": 0, "fail": 0, "remainder": 0, "error": 0}
    for idx in range(count):
        e, a, b = corpus_integrand(rng)
        comps = [
            _corpus_component(e, Interval(a - b, math.inf), n_points),
            _corpus_component(e, Interval(-math.inf, -a - b), n_points),
        ]
        for c in comps:
            totals[c["status"]] += 1
        entries.append({"index": idx, "integrand": to_string(e), "a": str(a), "b": str(b), "components": comps})
    total = sum(totals.values())
    return {
        "seed": seed,
        "count": count,
        "entries": entries,
        "totals": totals,
        "remainder_share": totals["remainder"] / total,
        "wall_time": time.perf_counter() - t0,
    }
