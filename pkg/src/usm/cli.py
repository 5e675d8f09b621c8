"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 no template, 4 unintegrable remainder,
5 verification failed, 6 bad domain or branch.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, TextIO

from usm import branchlib
from usm.expr import ParseError, parse, to_string
from usm.expr.interval import parse_interval
from usm.pipeline import (
    DivergentIntegral,
    IntegrationRequest,
    IntegrationResult,
    Presubstitution,
    UnintegrableRemainder,
    definite,
    integrate,
    run_corpus,
)
from usm.transforms import DomainError, NoTemplateError, classify_quadratic, euler_parameters

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_TEMPLATE = 3
EXIT_REMAINDER = 4
EXIT_VERIFY = 5
EXIT_DOMAIN = 6

_STR = {"type": "string"}
_PIECES = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["interval", "expr"],
        "properties": {"interval": _STR, "expr": _STR},
    },
}

RESULT_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "input",
        "variable",
        "domain",
        "plan",
        "transformed_integrand",
        "param_antiderivative",
        "antiderivative",
        "verification",
        "chain",
    ],
    "properties": {
        "input": _STR,
        "variable": _STR,
        "domain": _STR,
        "plan": {
            "type": "object",
            "required": ["kind", "a", "b", "branch"],
            "properties": {"kind": {"type": "integer"}, "a": _STR, "b": _STR, "branch": _STR, "route": _STR},
        },
        "transformed_integrand": _STR,
        "param_antiderivative": _STR,
        "antiderivative": _PIECES,
        "verification": {
            "type": ["object", "null"],
            "required": ["max_rel_err", "pass", "n_points"],
            "properties": {
                "max_rel_err": {"type": ["number", "null"]},
                "pass": {"type": "boolean"},
                "n_points": {"type": "integer"},
            },
        },
        "chain": {"type": "array", "items": {"type": "object"}},
        "value": {"type": "number"},
    },
}


@dataclass
class CliConfig:
    subcommand: str
    expression: str = ""
    variable: str = "x"
    domain: str = "(-inf,inf)"
    transform: str = "auto"
    branch: str = "auto"
    json: bool = False
    depth: int = 2
    seed: int = 1
    count: int = 100


def _finite(v: float) -> Optional[float]:
    return v if math.isfinite(v) else None


def result_to_json(res: IntegrationResult, text: str) -> dict:
    plan = res.plan
    rep = res.verification
    return {
        "input": text,
        "variable": res.request.variable,
        "domain": str(res.request.domain),
        "plan": {
            "kind": plan.kind,
            "a": str(plan.a),
            "b": str(plan.b),
            "branch": plan.branch.value,
            "route": plan.route,
        },
        "transformed_integrand": to_string(res.transformed_integrand),
        "param_antiderivative": to_string(res.param_antiderivative.to_expr()),
        "antiderivative": [{"interval": str(iv), "expr": to_string(e)} for iv, e in res.antiderivative.pieces],
        "verification": None
        if rep is None
        else {"max_rel_err": _finite(rep.max_rel_err), "pass": rep.passed, "n_points": rep.n_points},
        "chain": [
            {
                "variable": c.request.variable,
                "domain": str(c.request.domain),
                "plan": {"kind": c.plan.kind, "a": str(c.plan.a), "b": str(c.plan.b), "branch": c.plan.branch.value},
                "antiderivative": [{"interval": str(iv), "expr": to_string(e)} for iv, e in c.antiderivative.pieces],
            }
            for c in res.chain
        ],
    }


def _transform_choice(s: str):
    return int(s) if s.isdigit() else s


def _presub(args) -> Optional[Presubstitution]:
    if not args.presub:
        return None
    name, _, forward = args.presub.partition("=")
    if not forward or not args.inverse:
        raise ParseError("--presub needs the form u=EXPR together with --inverse EXPR")
    return Presubstitution(name.strip(), parse(forward), parse(args.inverse))


def _request(args) -> IntegrationRequest:
    return IntegrationRequest(
        parse(args.expression),
        args.variable,
        parse_interval(args.domain),
        transform_choice=_transform_choice(args.transform),
        branch_choice=args.branch,
        max_chain_depth=args.depth,
        presubstitution=_presub(args),
    )


def _cmd_integrate(args, out: TextIO) -> int:
    res = integrate(_request(args))
    rep = res.verification
    if args.json:
        json.dump(result_to_json(res, args.expression), out, indent=2)
        out.write("\n")
    else:
        for iv, e in res.antiderivative.pieces:
            out.write(f"{iv}: {to_string(e)}\n")
        out.write(
            f"verification: {'pass' if rep.passed else 'FAIL'} max_rel_err={rep.max_rel_err:.3e} points={rep.n_points}\n"
        )
    return EXIT_OK if rep.passed else EXIT_VERIFY


def _endpoint(v):
    if isinstance(v, float):
        return v
    return Fraction(v)


def _cmd_definite(args, out: TextIO) -> int:
    req = _request(args)
    value = definite(req, _endpoint(req.domain.lo), _endpoint(req.domain.hi))
    if args.json:
        json.dump({"input": args.expression, "variable": args.variable, "domain": args.domain, "value": value}, out)
        out.write("\n")
    else:
        out.write(f"{value!r}\n")
    return EXIT_OK


def identity_rows(theorem: str, grid: int) -> list[tuple[float, str, float]]:
    """Sweep one identity over its grid, returning ``(y, part, abs_error)``."""
    m = branchlib.SINGULAR_MARGIN

    def lin(lo, hi):
        return [lo + (hi - lo) * k / (grid - 1) for k in range(grid)]

    def outside(lo, hi):
        return [-y for y in lin(lo, hi)] + lin(lo, hi)

    rows = []
    if theorem == "1a":
        rows = [(y, "1A", branchlib.thm1_sides(y, "A").abs_error) for y in lin(-1.0, 1.0)]
    elif theorem == "1b":
        for form in ("csc", "sec"):
            for y in outside(1 + m, 100.0):
                if form == "sec" and abs(y + 1) < m:
                    continue
                rows.append((y, f"1B-{form}", branchlib.thm1_sides(y, "B", form).abs_error))
    elif theorem in ("2a", "2c"):
        part = theorem[1].upper()
        rows = [(y, "2" + part, branchlib.thm2_sides(y, part).abs_error) for y in outside(m, 1.0)]
    elif theorem == "2b":
        rows = [(y, "2B", branchlib.thm2_sides(y, "B").abs_error) for y in outside(1.0, 100.0)]
    elif theorem == "bridge":
        rows = [(y, "bridge", branchlib.bridge_sides(y).abs_error) for y in lin(-10.0, 10.0)]
    else:
        raise ValueError(f"unknown theorem {theorem!r}")
    return rows


def _cmd_identities(args, out: TextIO) -> int:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["y", "part", "abs_error"])
    for y, part, err in identity_rows(args.theorem, args.grid):
        w.writerow([repr(y), part, repr(err)])
    return EXIT_OK


_PYTHAGOREAN = (Fraction(5, 4), Fraction(13, 12), Fraction(5, 3), Fraction(17, 8), Fraction(25, 24))


def euler_rows(grid: int = 999) -> list[tuple[str, str, str, float]]:
    """``(check, component, x, error)`` for both Euler substitutions.

    Euler-1 sets are compared exactly at Pythagorean points of the unit
    Difference radical; Euler-2 compares ``t_E`` with ``-r`` on a grid.
    """
    rows = []
    diff = classify_quadratic(1, 0, -1)
    for y in _PYTHAGOREAN:
        for comp, x in (("upper", y), ("lower", -y)):
            ep = euler_parameters(diff, x)
            ok = {ep.u_plus, ep.u_minus} == {ep.t_usm, 1 / ep.t_usm}
            rows.append(("euler1", comp, str(x), 0.0 if ok else 1.0))
    circ = classify_quadratic(-1, 0, 1)
    for k in range(grid):
        u = -1 + 2 * (k + 1) / (grid + 1)
        if abs(u) < 1e-3:
            continue
        ep = euler_parameters(circ, u)
        rows.append(("euler2", "circular", repr(u), abs(ep.t_euler + ep.r_usm)))
    return rows


def _cmd_euler(args, out: TextIO) -> int:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["check", "component", "x", "error"])
    for r in euler_rows(args.grid):
        w.writerow([r[0], r[1], r[2], repr(r[3])])
    return EXIT_OK


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def _cmd_corpus(args, out: TextIO) -> int:
    report = run_corpus(args.seed, args.count)
    json.dump(_json_safe(report), out, indent=2)
    out.write("\n")
    return EXIT_OK if report["totals"]["fail"] == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="usm", description="Inverse-trig substitution integrator")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def integration_args(sp):
        sp.add_argument("expression")
        sp.add_argument("--variable", default="x")
        sp.add_argument("--domain", default="(-inf,inf)")
        sp.add_argument("--transform", default="auto", choices=["auto", "1", "2", "3", "4", "5", "weierstrass"])
        sp.add_argument("--branch", default="auto", choices=["auto", "upper", "lower"])
        sp.add_argument("--depth", type=int, default=2)
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--presub", help="rewrite the integrand first, e.g. u=x^2")
        sp.add_argument("--inverse", help="inverse of --presub on the domain, e.g. sqrt(u)")

    integration_args(sub.add_parser("integrate", help="antiderivative with numerical verification"))
    integration_args(sub.add_parser("definite", help="definite integral over --domain"))

    ids = sub.add_parser("identities", help="CSV of identity-oracle errors")
    ids.add_argument("--theorem", required=True, choices=["1a", "1b", "2a", "2b", "2c", "bridge"])
    ids.add_argument("--grid", type=int, default=2001)

    eu = sub.add_parser("euler", help="CSV of Euler substitution equivalence errors")
    eu.add_argument("--grid", type=int, default=999)

    co = sub.add_parser("corpus", help="self-verification corpus, JSON report")
    co.add_argument("--seed", type=int, default=1)
    co.add_argument("--count", type=int, default=100)
    return p


_COMMANDS = {
    "integrate": _cmd_integrate,
    "definite": _cmd_definite,
    "identities": _cmd_identities,
    "euler": _cmd_euler,
    "corpus": _cmd_corpus,
}


def run(argv: Sequence[str], out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(list(argv))
    try:
        return _COMMANDS[args.subcommand](args, out)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except NoTemplateError as exc:
        err.write(f"no template: {exc}\n")
        return EXIT_NO_TEMPLATE
    except UnintegrableRemainder as exc:
        err.write(f"{exc}\n")
        return EXIT_REMAINDER
    except (DomainError, DivergentIntegral, ValueError) as exc:
        err.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
