import math
import random
from fractions import Fraction

import pytest
from scipy.integrate import quad

from usm.expr import Interval, compile_expr, parse, to_string
from usm.pipeline import (
    DivergentIntegral,
    IntegrationRequest,
    Presubstitution,
    UnintegrableRemainder,
    chebyshev_points,
    corpus_integrand,
    definite,
    integrate,
    run_corpus,
    verify_antiderivative,
)
from usm.backsub import Antiderivative
from usm.transforms import NoTemplateError

INF = math.inf
SQUARE_PRESUB = Presubstitution("u", parse("x^2"), parse("sqrt(u)"))

# (label, integrand, domain, reference closed form, presub)
CLOSED_FORMS = [
    ("sqrt_difference", "sqrt(x^2-1)", (1, INF), "(x*sqrt(x^2-1) - ln(x+sqrt(x^2-1)))/2", None),
    ("reciprocal_x_sqrt", "1/(x*sqrt(x^2+x))", (0, INF), "2/(x - sqrt(x^2+x))", None),
    ("sqrt_ratio", "sqrt((x+1)/(x+3))", (-1, INF), "ln(x+2-sqrt(x^2+4*x+3)) + sqrt(x^2+4*x+3)", None),
    ("cubic_circular", "1/(x^3*sqrt(4-x^2))", (0, 2), "(ln(abs((2-sqrt(4-x^2))/x)) - 2*sqrt(4-x^2)/x^2)/16", None),
    (
        "sqrt_half_tan_acsc_square",
        "sqrt(tan(acsc(x^2)/2))",
        (1, INF),
        "sqrt(2)/4*(sec(acsc(x^2)/2) - ln(abs(tan(acsc(x^2)/4))))",
        SQUARE_PRESUB,
    ),
    ("exp_acos", "exp(acos(x))", (-1, 1), "exp(acos(x))*(x - sqrt(1-x^2))/2", None),
]


def _request(src, dom, presub=None, **kw):
    return IntegrationRequest(parse(src), "x", Interval(*dom), presubstitution=presub, **kw)


def constant_spread(result, closed: str, per_piece: int = 8) -> float:
    ref = compile_expr(parse(closed))
    worst = 0.0
    for iv, piece in result.antiderivative.pieces:
        fn = compile_expr(piece)
        xs, _ = chebyshev_points(iv, per_piece)
        diffs = [(fn({"x": x}) - ref({"x": x})).real for x in xs]
        worst = max(worst, max(diffs) - min(diffs))
    return worst


@pytest.mark.parametrize("label,src,dom,closed,presub", CLOSED_FORMS, ids=[c[0] for c in CLOSED_FORMS])
def test_reference_closed_forms(label, src, dom, closed, presub):
    res = integrate(_request(src, dom, presub))
    assert res.verification.passed and res.verification.max_rel_err <= 1e-7
    assert res.verification.n_points == 64
    assert constant_spread(res, closed) <= 1e-9


def test_sqrt_difference_exact_form():
    res = integrate(_request("sqrt(x^2-1)", (1, INF)))
    assert [to_string(e) for _, e in res.antiderivative.pieces] == ["x*sqrt(x^2 - 1)/2 - ln(x + sqrt(x^2 - 1))/2"]


def test_sqrt_difference_lower_component():
    res = integrate(_request("sqrt(x^2-1)", (-INF, -1)))
    assert res.plan.branch.value == "lower" and res.verification.passed


def test_reciprocal_x_sqrt_other_component():
    res = integrate(_request("1/(x*sqrt(x^2+x))", (-INF, -1)))
    assert res.verification.passed


def test_inverse_square_sum_definite():
    v = definite(_request("1/(x+sqrt(1+x^2))^2", (0, INF)), 0, INF)
    assert abs(v - 2 / 3) <= 1e-12


def test_half_tan_difference_split_at_pole():
    res = integrate(_request("1/(tan(acsc(x)/2)-tan(asec(x)/2))", (1, INF)))
    cuts = [iv.hi for iv, _ in res.antiderivative.pieces[:-1]]
    assert len(cuts) == 1 and abs(cuts[0] - math.sqrt(2)) < 1e-12
    assert res.verification.passed


def test_exp_acos_transformed_integrand():
    res = integrate(_request("exp(acos(x))", (-1, 1)))
    assert to_string(res.transformed_integrand) == "t^(i)/2 - t^(-2 + i)/2"


class TestDefinite:
    def test_pythagorean_limit(self):
        v = definite(_request("sqrt(x^2-1)", (1, INF)), 1, Fraction(5, 4))
        assert abs(v - (Fraction(15, 32) - math.log(2) / 2)) <= 1e-14

    def test_reversed_limits(self):
        a = definite(_request("sqrt(x^2-1)", (1, INF)), 2, 3)
        b = definite(_request("sqrt(x^2-1)", (1, INF)), 3, 2)
        assert a == pytest.approx(-b, abs=1e-15)

    def test_divergent(self):
        with pytest.raises(DivergentIntegral):
            definite(_request("1/sqrt(x^2+1)", (0, INF)), 0, INF)

    @pytest.mark.parametrize(
        "src,lo,hi",
        [
            ("x^2*sqrt(x^2-4)", 2.5, 7),
            ("1/(x^2*sqrt(x^2+9))", 0.5, 4),
            ("sqrt(9-x^2)", -2.5, 1),
            ("(x+1)/sqrt(x^2+2*x+5)", -3, 2),
            ("tan(acsc(x)/2)/(x+1)", 1.5, 6),
        ],
    )
    def test_against_quadrature(self, src, lo, hi):
        f = compile_expr(parse(src))
        want = quad(lambda x: f({"x": x}).real, lo, hi, epsabs=1e-13, epsrel=1e-13)[0]
        got = definite(_request(src, (lo, hi)), lo, hi)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))

    def test_random_corpus_definite(self):
        rng = random.Random(11)
        done = 0
        while done < 10:
            e, a, b = corpus_integrand(rng)
            lo = float(a - b) + 0.25
            hi = lo + 2
            f = compile_expr(e)
            try:
                got = definite(IntegrationRequest(e, "x", Interval(a - b, INF)), lo, hi)
            except (DivergentIntegral, UnintegrableRemainder):
                continue
            want, err = quad(lambda x: f({"x": x}).real, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200)
            if err > 1e-9:
                continue
            assert abs(got - want) <= 1e-8 * max(1.0, abs(want)), to_string(e)
            done += 1


class TestErrors:
    def test_no_template(self):
        with pytest.raises(NoTemplateError):
            integrate(_request("sin(x)*ln(x)", (1, 2)))

    def test_remainder(self):
        with pytest.raises(UnintegrableRemainder) as info:
            integrate(_request("x^(1/3)*sqrt(x^2-1)", (1, INF)))
        assert info.value.remainder is not None

    def test_request_validation(self):
        with pytest.raises(ValueError):
            _request("x", (0, 1), max_chain_depth=0)


class TestVerification:
    def test_wrong_antiderivative_fails(self):
        F = Antiderivative([(Interval(1, INF), parse("x*sqrt(x^2-1)/2"))], "x")
        rep = verify_antiderivative(parse("sqrt(x^2-1)"), F)
        assert not rep.passed and rep.max_rel_err > 1e-7

    def test_points_env(self, monkeypatch):
        monkeypatch.setenv("USM_VERIFY_POINTS", "16")
        res = integrate(_request("sqrt(x^2-1)", (1, INF)))
        assert res.verification.n_points == 16 and len(res.verification.points) == 16

    def test_chebyshev_points_stay_inside(self):
        xs, margin = chebyshev_points(Interval(1, 2), 64)
        assert len(xs) == 64 and all(1 + margin <= x <= 2 - margin for x in xs)
        xs, _ = chebyshev_points(Interval(1, INF), 8)
        assert min(xs) > 1 and max(xs) <= 9


def test_small_corpus():
    rep = run_corpus(7, 15)
    assert rep["totals"]["fail"] == 0
    assert rep["totals"]["pass"] + rep["totals"]["remainder"] == 30
