"""One PASS/FAIL line per acceptance criterion, at the stated tolerances."""

import math
import time
from fractions import Fraction

import pytest

from conftest import PYTHAGOREAN
from usm.cli import euler_rows, identity_rows
from usm.expr import Interval, parse, simplify
from usm.pipeline import IntegrationRequest, definite, integrate, run_corpus
from usm.transforms import Shape, classify_quadratic, euler_parameters

import test_backsub
import test_expr
import test_pipeline
import test_poly
import test_transforms


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


def test_criterion_1_identity_suites(report):
    t0 = time.perf_counter()
    worst = {th: max(r[2] for r in identity_rows(th, 2001)) for th in ("1a", "1b", "2a", "2b", "2c", "bridge")}
    dt = time.perf_counter() - t0
    ok = all(v <= 1e-12 for v in worst.values()) and dt < 5
    report(1, ok, f"max abs err {max(worst.values()):.2e}, {dt:.2f} s")


def test_criterion_2_reference_forms(report):
    t0 = time.perf_counter()
    spreads, errs = [], []
    for label, src, dom, closed, presub in test_pipeline.CLOSED_FORMS:
        res = integrate(IntegrationRequest(parse(src), "x", Interval(*dom), presubstitution=presub))
        errs.append(res.verification.max_rel_err if res.verification.passed else math.inf)
        spreads.append(test_pipeline.constant_spread(res, closed))
    v3 = definite(IntegrationRequest(parse("1/(x+sqrt(1+x^2))^2"), "x", Interval(0, math.inf)), 0, math.inf)
    dt = time.perf_counter() - t0
    ok = max(errs) <= 1e-7 and max(spreads) <= 1e-9 and abs(v3 - 2 / 3) <= 1e-12 and dt < 10
    report(2, ok, f"max rel err {max(errs):.1e}, max spread {max(spreads):.1e}, definite err {abs(v3 - 2 / 3):.1e}, {dt:.2f} s")


def test_criterion_3_binomial_difference(report):
    from usm.backsub import binomial_difference
    from usm.transforms import Branch

    bad = 0
    for n in range(1, 13):
        for p in PYTHAGOREAN:
            for branch in (Branch.UPPER, Branch.LOWER):
                try:
                    test_backsub.test_binomial_difference_exact(n, p, branch)
                except AssertionError:
                    bad += 1
    forms = ["-2*sqrt(y^2-1)", "-4*y*sqrt(y^2-1)", "-2*(4*y^2-1)*sqrt(y^2-1)"]
    listed = all(simplify(binomial_difference(n, "y")) == simplify(parse(f)) for n, f in enumerate(forms, 1))
    report(3, bad == 0 and listed, f"{72 - bad}/72 exact identities, D1..D3 listed forms {'match' if listed else 'differ'}")


def test_criterion_4_euler(report):
    ok1 = all(r[3] == 0.0 for r in euler_rows() if r[0] == "euler1")
    q = classify_quadratic(1, 0, -1)
    for p in PYTHAGOREAN:
        for x in (p, -p):
            ep = euler_parameters(q, x)
            ok1 &= ep.exact and {ep.u_plus, ep.u_minus} == {ep.t_usm, 1 / ep.t_usm}
    e2 = [r[3] for r in euler_rows(999) if r[0] == "euler2"]
    ok2 = len(e2) >= 990 and max(e2) <= 1e-12
    triples = [((1, 4, 3), Shape.DIFFERENCE, 1), ((-1, 0, 4), Shape.CIRCULAR, 2), ((1, 0, 1), Shape.SUM, 1)]
    ok3 = all(
        classify_quadratic(*c).shape is s and classify_quadratic(*c).radius_value == Fraction(A) for c, s, A in triples
    )
    report(4, ok1 and ok2 and ok3, f"euler1 exact {ok1}, euler2 max {max(e2):.1e} over {len(e2)} points, classifier {ok3}")


def test_criterion_5_weierstrass(report):
    from scipy.integrate import quad

    v = definite(IntegrationRequest(parse("1/(2+cos(w))"), "w", Interval(0, math.pi / 2)), 0, math.pi / 2)
    exact = math.pi / (3 * math.sqrt(3))
    q, _ = quad(lambda w: 1 / (2 + math.cos(w)), 0, math.pi / 2, epsabs=1e-14, epsrel=1e-14)
    # closed form through int 2 dr/(r^2+3) on r in (0, 1)
    derived = 2 / math.sqrt(3) * math.atan(1 / math.sqrt(3))
    ok = abs(v - exact) <= 1e-9 and abs(v - q) <= 1e-9 and abs(v - derived) <= 1e-9
    try:
        test_transforms.TestWeierstrass().test_random_quadrature()
        rnd = True
    except AssertionError:
        rnd = False
    report(5, ok and rnd, f"value {v:.15f} vs {exact:.15f}, 20 random trig integrands {'pass' if rnd else 'fail'}")


def test_criterion_6_round_trips(report):
    m = test_transforms.TestMaps()
    fails = []
    for name, call in (
        ("round trips", m.test_round_trips),
        *(
            (f"jacobian k{k} a={a} b={b}", lambda k=k, a=a, b=b: m.test_jacobian_same_on_both_branches(k, a, b))
            for k in (1, 2)
            for a, b in ((1, 0), (Fraction(1, 2), Fraction(1, 2)), (3, -2))
        ),
    ):
        try:
            call()
        except AssertionError:
            fails.append(name)
    report(6, not fails, "100 round trips within 1e-10, Jacobians equal" if not fails else f"failed: {fails}")


def test_criterion_7_corpus(report):
    rep = run_corpus(1, 100)
    t = rep["totals"]
    ok = rep["wall_time"] < 60 and t["fail"] == 0 and t["error"] == 0 and rep["remainder_share"] < 0.2
    report(7, ok, f"{t}, remainder share {rep['remainder_share']:.0%}, {rep['wall_time']:.1f} s")


def test_criterion_8_property_suites(report):
    suites = {
        "normalization idempotence": test_expr.test_simplify_idempotent,
        "parse/print round trip": test_expr.test_parse_print_round_trip,
        "partial-fraction reconstruction": test_poly.test_partial_fraction_reconstruction,
        "D_n recurrence": test_backsub.test_recurrence,
    }
    failed = []
    for name, fn in suites.items():
        try:
            fn()
        except Exception as exc:  # hypothesis re-raises the falsifying example
            failed.append(f"{name}: {type(exc).__name__}")
    report(8, not failed, "all suites >= 100 cases" if not failed else "; ".join(failed))
