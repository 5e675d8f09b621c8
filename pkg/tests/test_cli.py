import csv
import io
import json

import jsonschema
import pytest

from usm.cli import RESULT_SCHEMA, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_integrate_sqrt_difference_text():
    code, out, _ = call("integrate", "sqrt(x^2-1)", "--domain", "(1,inf)")
    assert code == 0
    assert "x*sqrt(x^2 - 1)/2 - ln(x + sqrt(x^2 - 1))/2" in out
    assert "verification: pass" in out


def test_definite_inverse_square_sum():
    code, out, _ = call("definite", "1/(x+sqrt(1+x^2))^2", "--domain", "(0,inf)")
    assert code == 0 and out.startswith("0.666666666")


@pytest.mark.parametrize(
    "argv,code",
    [
        (["integrate", "sin(x)*ln(x)", "--domain", "(1,2)"], 3),
        (["integrate", "sqrt(x^2-1", "--domain", "(1,2)"], 2),
        (["integrate", "2x", "--domain", "(1,2)"], 2),
        (["integrate", "x^(1/3)*sqrt(x^2-1)", "--domain", "(1,inf)"], 4),
        (["integrate", "sqrt(x^2-1)", "--domain", "(1,inf)", "--branch", "lower"], 6),
        (["integrate", "sqrt(x^2-1)", "--domain", "(-2,2)"], 6),
        (["integrate", "sqrt(x^2-1)", "--domain", "(3,1)"], 6),
        (["definite", "1/sqrt(x^2+1)", "--domain", "(0,inf)"], 6),
    ],
)
def test_exit_codes(argv, code):
    assert call(*argv)[0] == code


@pytest.mark.parametrize(
    "expr,dom",
    [
        ("sqrt(x^2-1)", "(1,inf)"),
        ("1/(x^3*sqrt(4-x^2))", "(0,2)"),
        ("1/(tan(acsc(x)/2)-tan(asec(x)/2))", "(1,inf)"),
        ("exp(acos(x))", "(-1,1)"),
        ("1/(2+cos(x))", "(-pi,pi)"),
    ],
)
def test_json_schema_and_text_agree(expr, dom):
    code, out, _ = call("integrate", expr, "--domain", dom, "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, RESULT_SCHEMA)
    _, text, _ = call("integrate", expr, "--domain", dom)
    lines = [ln.split(": ", 1) for ln in text.splitlines() if not ln.startswith("verification")]
    assert [p["expr"] for p in doc["antiderivative"]] == [ln[1] for ln in lines]
    assert [p["interval"] for p in doc["antiderivative"]] == [ln[0] for ln in lines]
    assert doc["verification"]["max_rel_err"] <= 1e-7


def test_presub_flag():
    code, out, _ = call(
        "integrate", "sqrt(tan(acsc(x^2)/2))", "--domain", "(1,inf)", "--presub", "u=x^2", "--inverse", "sqrt(u)", "--json"
    )
    assert code == 0
    jsonschema.validate(json.loads(out), RESULT_SCHEMA)


def test_explicit_transform():
    code, out, _ = call("integrate", "1/(2+cos(x))", "--domain", "(-pi,pi)", "--transform", "weierstrass", "--json")
    assert code == 0 and json.loads(out)["plan"]["route"] == "weierstrass"


@pytest.mark.parametrize("theorem", ["1a", "1b", "2a", "2b", "2c", "bridge"])
def test_identities_csv(theorem):
    code, out, _ = call("identities", "--theorem", theorem, "--grid", "101")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) >= 101
    assert max(float(r["abs_error"]) for r in rows) <= 1e-12


def test_euler_csv():
    code, out, _ = call("euler")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert {r["check"] for r in rows} == {"euler1", "euler2"}
    assert max(float(r["error"]) for r in rows) <= 1e-12


def test_corpus_json():
    code, out, _ = call("corpus", "--seed", "3", "--count", "5")
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 5 and len(doc["entries"]) == 5


def test_verification_failure_exit_code_implies_large_error(monkeypatch):
    import usm.cli as cli
    from usm.pipeline import VerificationReport

    real = cli.integrate

    def broken(req):
        res = real(req)
        res.verification = VerificationReport([], 1e-3, False, 0.0, 64)
        return res

    monkeypatch.setattr(cli, "integrate", broken)
    code, out, _ = call("integrate", "sqrt(x^2-1)", "--domain", "(1,inf)", "--json")
    assert code == 5 and json.loads(out)["verification"]["max_rel_err"] > 1e-7
