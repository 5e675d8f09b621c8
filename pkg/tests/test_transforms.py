import math
import random
from fractions import Fraction

import pytest
from scipy.integrate import quad

from conftest import PYTHAGOREAN
from usm.expr import Interval, compile_expr, eval_complex, parse, simplify, to_string
from usm.pipeline import IntegrationRequest, definite
from usm.transforms import (
    Branch,
    ConflictingTemplateError,
    DomainError,
    NoTemplateError,
    Shape,
    TransformPlan,
    UnmappedBlockError,
    apply_substitution,
    build_substitution,
    classify_quadratic,
    detect_template,
    euler_parameters,
    weierstrass_reduce,
)

INF = math.inf
PARAM = {1: "t", 2: "t", 3: "s", 4: "r", 5: "r"}


def plan(kind, a, b, branch, domain):
    return TransformPlan(kind, Fraction(a), Fraction(b), branch, domain, PARAM[kind])


def random_case(rng):
    kind = rng.randint(1, 5)
    a = Fraction(rng.randint(1, 8), rng.randint(1, 3))
    b = Fraction(rng.randint(-6, 6), rng.randint(1, 2))
    if kind in (1, 2):
        branch = rng.choice([Branch.UPPER, Branch.LOWER])
        y = rng.uniform(1.001, 30)
        y = y if branch is Branch.UPPER else -y
        dom = Interval(a - b, INF) if branch is Branch.UPPER else Interval(-INF, -a - b)
    elif kind == 3:
        branch, y, dom = Branch.NOT_APPLICABLE, rng.uniform(-30, 30), Interval.real_line()
        if abs(y) < 1e-3:
            y = 0.5
    else:
        branch, y, dom = Branch.UPPER, rng.uniform(-0.999, 0.999), Interval(-a - b, a - b)
    x = float(a) * y - float(b)
    return plan(kind, a, b, branch, dom), x


class TestDetection:
    @pytest.mark.parametrize(
        "src,dom,kind,a,b,branch",
        [
            ("sqrt(x^2-1)", (1, INF), 2, 1, 0, Branch.UPPER),
            ("sqrt(x^2-1)", (-INF, -1), 2, 1, 0, Branch.LOWER),
            ("1/(x*sqrt(x^2+x))", (0, INF), 2, Fraction(1, 2), Fraction(1, 2), Branch.UPPER),
            ("1/(x+sqrt(1+x^2))^2", (0, INF), 3, 1, 0, Branch.NOT_APPLICABLE),
            ("sqrt((x+1)/(x+3))", (-1, INF), 2, 1, 2, Branch.UPPER),
            ("1/(x^3*sqrt(4-x^2))", (0, 2), 5, 2, 0, Branch.UPPER),
            ("1/(tan(acsc(x)/2)-tan(asec(x)/2))", (1, INF), 1, 1, 0, Branch.UPPER),
        ],
    )
    def test_examples(self, src, dom, kind, a, b, branch):
        p = detect_template(parse(src), "x", Interval(*dom))
        assert (p.kind, p.a, p.b, p.branch) == (kind, a, b, branch)

    def test_exp_acos_route(self):
        p = detect_template(parse("exp(acos(x))"), "x", Interval(-1, 1))
        assert p.route == "exp_acos" and p.kind == 1

    def test_no_template(self):
        with pytest.raises(NoTemplateError):
            detect_template(parse("sin(x)*ln(x)"), "x", Interval(1, 2))

    def test_conflicting(self):
        with pytest.raises(ConflictingTemplateError):
            detect_template(parse("sqrt(x^2-1)*sqrt(x^2-4)"), "x", Interval(3, INF))

    def test_domain_straddles_components(self):
        with pytest.raises(DomainError):
            detect_template(parse("sqrt(x^2-1)"), "x", Interval(-2, 2))

    def test_explicit_branch_mismatch(self):
        with pytest.raises(DomainError):
            detect_template(parse("sqrt(x^2-1)"), "x", Interval(1, INF), branch="lower")

    def test_unmapped_block(self):
        p = plan(3, 1, 0, Branch.NOT_APPLICABLE, Interval.real_line())
        with pytest.raises(UnmappedBlockError):
            apply_substitution(parse("sqrt(x^2+1)*sin(x)"), build_substitution(p))


class TestMaps:
    def test_round_trips(self):
        rng = random.Random(20261014)
        for _ in range(100):
            p, x = random_case(rng)
            smap = build_substitution(p)
            param = eval_complex(smap.backsub[0][1], {"x": x})
            back = eval_complex(smap.x_of_param, {p.param_name: param})
            assert abs(back - x) <= 1e-10 * max(1.0, abs(x)), (p, x, param)

    @pytest.mark.parametrize("kind", [1, 2])
    @pytest.mark.parametrize("a,b", [(1, 0), (Fraction(1, 2), Fraction(1, 2)), (3, -2)])
    def test_jacobian_same_on_both_branches(self, kind, a, b):
        up = build_substitution(plan(kind, a, b, Branch.UPPER, Interval(a - b, INF)))
        lo = build_substitution(plan(kind, a, b, Branch.LOWER, Interval(-INF, -a - b)))
        assert up.jacobian == lo.jacobian
        assert up.x_of_param == lo.x_of_param

    def test_blocks_consistent(self):
        rng = random.Random(7)
        checked = 0
        for _ in range(60):
            p, x = random_case(rng)
            smap = build_substitution(p)
            param = eval_complex(smap.backsub[0][1], {"x": x})
            for bx, bp in smap.block_map:
                vx = eval_complex(bx, {"x": x})
                vp = eval_complex(bp, {p.param_name: param})
                assert abs(vx - vp) <= 1e-9 * max(1.0, abs(vx)), (p, to_string(bx), x)
                checked += 1
        assert checked > 100

    def test_sqrt_difference_transformed(self):
        p = detect_template(parse("sqrt(x^2-1)"), "x", Interval(1, INF))
        g = apply_substitution(parse("sqrt(x^2-1)"), build_substitution(p))
        assert simplify(g) == simplify(parse("-(t^2-1)^2/(4*t^3)"))

    def test_half_tan_difference_transformed(self):
        p = detect_template(parse("1/(tan(acsc(x)/2)-tan(asec(x)/2))"), "x", Interval(1, INF))
        g = apply_substitution(parse("1/(tan(acsc(x)/2)-tan(asec(x)/2))"), build_substitution(p))
        want = parse("(t-1)*(t+1)^2/(2*t^2*(t^2+2*t-1))")
        for tv in (0.3, 0.7, 0.9):
            assert abs(eval_complex(g, {"t": tv}) - eval_complex(want, {"t": tv})) < 1e-12


class TestEuler:
    @pytest.mark.parametrize(
        "coeffs,shape,A",
        [((1, 4, 3), Shape.DIFFERENCE, 1), ((-1, 0, 4), Shape.CIRCULAR, 2), ((1, 0, 1), Shape.SUM, 1)],
    )
    def test_classifier(self, coeffs, shape, A):
        q = classify_quadratic(*coeffs)
        assert q.shape is shape and q.radius_value == A

    @pytest.mark.parametrize("y", PYTHAGOREAN)
    @pytest.mark.parametrize("sign", [1, -1])
    def test_euler1_exact(self, y, sign):
        q = classify_quadratic(1, 0, -1)
        ep = euler_parameters(q, sign * y)
        assert ep.exact
        A = q.radius_value
        assert {ep.u_plus, ep.u_minus} == {A * ep.t_usm, A / ep.t_usm}

    def test_euler1_scaled(self):
        # sqrt(x^2 + 4x + 3) = sqrt((x+2)^2 - 1) at x = 5/4 - 2
        q = classify_quadratic(1, 4, 3)
        ep = euler_parameters(q, Fraction(5, 4) - 2)
        assert ep.exact and {ep.u_plus, ep.u_minus} == {ep.t_usm, 1 / ep.t_usm}

    def test_euler2_grid(self):
        q = classify_quadratic(-1, 0, 4)
        A = 2.0
        worst = 0.0
        n = 0
        for k in range(999):
            u = -1 + 2 * (k + 1) / 1000
            if abs(u) < 1e-3:
                continue
            ep = euler_parameters(q, A * u)
            worst = max(worst, abs(ep.t_euler + ep.r_usm))
            n += 1
        assert n >= 990 and worst <= 1e-12

    def test_euler2_exact_point(self):
        ep = euler_parameters(classify_quadratic(-1, 0, 25), 3)
        assert ep.exact and ep.t_euler == Fraction(-1, 3) and ep.r_usm == Fraction(1, 3)

    def test_axis_guard(self):
        with pytest.raises(DomainError):
            euler_parameters(classify_quadratic(-1, 0, 4), 0)


class TestWeierstrass:
    def test_reduce(self):
        g, smap = weierstrass_reduce(parse("1/(2+cos(w))"))
        assert simplify(g) == simplify(parse("2/(r^2+3)"))

    def test_definite(self):
        v = definite(IntegrationRequest(parse("1/(2+cos(w))"), "w", Interval(0, math.pi / 2)), 0, math.pi / 2)
        assert abs(v - math.pi / (3 * math.sqrt(3))) <= 1e-9

    def test_random_quadrature(self):
        rng = random.Random(5)
        for _ in range(20):
            c = [rng.randint(-3, 3) for _ in range(3)]
            e_, f_ = rng.randint(-2, 2), rng.randint(-2, 2)
            d = abs(e_) + abs(f_) + rng.randint(1, 3)
            src = f"({c[0]} + {c[1]}*sin(w) + {c[2]}*cos(w))/({d} + {e_}*cos(w) + {f_}*sin(w))"
            lo, hi = rng.uniform(-3, 0), rng.uniform(0.1, 3)
            f = compile_expr(parse(src))
            want = quad(lambda w: f({"w": w}).real, lo, hi, epsabs=1e-13, epsrel=1e-13)[0]
            got = definite(IntegrationRequest(parse(src), "w", Interval(-math.pi, math.pi)), lo, hi)
            assert abs(got - want) <= 1e-8 * max(1.0, abs(want)), src
