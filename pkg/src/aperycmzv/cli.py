"""Command-line interface.

Exit codes: 0 success, 2 parse/validation errors, 3 evaluation failures.
Numeric values are emitted as decimal strings (never binary floats), so JSON
output survives 40-digit precision round trips.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .catalog import UnknownConstant, catalog_names, constant, find_relation
from .compiler import compile_spec, compile_squared
from .cov import to_x_alphabet
from .hp import mp_str, working_digits
from .normalize import canonicalize
from .pipeline import EvaluationError, cmzv_expression, evaluate_series
from .series import SeriesSpec, SpecSyntaxError, parse_spec, validate
from .suite import run_suite
from .words import word_str

PARSE_ERROR, EVAL_ERROR = 2, 3


def _fail(code, msg):
    print(f"error: {msg}", file=sys.stderr)
    sys.exit(code)


def _load_spec(args) -> SeriesSpec:
    try:
        spec = parse_spec(args.spec,
                          binom_power=2 if getattr(args, "bsq", False) else 1,
                          x2=Fraction(args.x2))
    except SpecSyntaxError as exc:
        _fail(PARSE_ERROR, f"syntax: {exc}")
    except (ValueError, ZeroDivisionError) as exc:
        _fail(PARSE_ERROR, str(exc))
    if getattr(args, "alias_n", False):
        spec = SeriesSpec(tuple(("n" if f == "e" else f, s) for f, s in spec.factors),
                          spec.junctions, spec.binom_power, spec.x2)
    bad = validate(spec)
    if bad:
        _fail(PARSE_ERROR, "invalid spec: " + "; ".join(bad))
    return spec


def _cmzv_json(expr):
    return [{"coeff": str(c), "s": list(s), "z": [str(zj) for zj in z]}
            for c, s, z in expr]


def cmd_eval(args):
    spec = _load_spec(args)
    try:
        res = evaluate_series(spec, digits=args.digits, engine=args.engine)
    except (EvaluationError, RuntimeError, ValueError) as exc:
        _fail(EVAL_ERROR, f"evaluation failed: {exc}")
    with working_digits(args.digits + 5):
        out = {
            "spec": spec.to_json(),
            "value": {"re": mp_str(res.value.real, args.digits),
                      "im": mp_str(res.value.imag, args.digits)},
            "est_error": res.value.err,
            "engine": res.engine,
            "terms": res.n_marches,
        }
        if res.combo.contains_divergent_piece:
            out["parts"] = {
                "main": mp_str(res.parts["main"].value.real, args.digits),
                "head_diagonal": mp_str(res.parts["head_diagonal"].value.real,
                                        args.digits),
            }
        if args.stage == "cmzv":
            try:
                out["cmzv"] = _cmzv_json(cmzv_expression(spec))
            except EvaluationError as exc:
                _fail(EVAL_ERROR, str(exc))
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"value      = {out['value']['re']}"
              + (f" + {out['value']['im']} i" if float(res.value.imag) else ""))
        print(f"est_error  = {out['est_error']:.2e}")
        print(f"engine     = {out['engine']}   (marched words: {out['terms']})")
        if "parts" in out:
            print(f"main part          = {out['parts']['main']}")
            print(f"head-diagonal part = {out['parts']['head_diagonal']}")
        for entry in out.get("cmzv", []):
            print(f"  {entry['coeff']} * Li_{tuple(entry['s'])}({', '.join(entry['z'])})")
    return 0


def cmd_compile(args):
    spec = _load_spec(args)
    stage = args.stage
    out = {"spec": spec.to_json(), "stage": stage}
    if stage == "parsed":
        body = []
    elif stage == "normalized":
        combo = canonicalize(spec)
        out["normalized"] = combo.to_json()
        body = [f"({t.coeff}) {t.spec.to_dsl()}" for t in combo.terms]
        body += [f"({t.coeff}) {t.spec.to_dsl()}   [divergent bundle]"
                 for t in combo.divergent]
        if combo.constant:
            body.append(f"constant: {combo.constant}")
    else:
        combo = canonicalize(spec)
        pis = []
        for t in combo.terms:
            pi = (compile_squared(t.spec) if spec.binom_power == 2
                  else compile_spec(t.spec)).scaled(t.coeff)
            pis.append(pi)
        if stage == "omega":
            out["terms"] = []
            body = []
            for pi in pis:
                for coeff, pid, word in pi.terms:
                    body.append(f"({coeff}) [{pid}] "
                                f"{word_str(word[:-1]) if len(word) > 1 else '(empty)'}"
                                f" | {word[-1]}")
                    out["terms"].append({"coeff": str(coeff), "prefactor": pid,
                                         "word": [str(l) for l in word]})
        elif stage == "x-alphabet":
            out["terms"] = []
            body = []
            for pi in pis:
                for ct in to_x_alphabet(pi):
                    body.append(str(ct))
                    out["terms"].append({"coeff": str(ct.scalar),
                                         "prefactor": ct.prefactor,
                                         "word": [str(l) for l in ct.word]})
        elif stage == "cmzv":
            try:
                expr = cmzv_expression(spec)
            except EvaluationError as exc:
                _fail(EVAL_ERROR, str(exc))
            out["cmzv"] = _cmzv_json(expr)
            body = [f"({c}) Li_{s}({', '.join(str(zj) for zj in z)})"
                    for c, s, z in expr]
        else:
            _fail(PARSE_ERROR, f"unknown stage {stage!r}")
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"# stage {stage}: {spec}")
        for line in body:
            print(line)
    return 0


def cmd_catalog(args):
    if args.list or not args.name:
        names = catalog_names()
        if args.json:
            print(json.dumps(names))
        else:
            print("\n".join(names))
        return 0
    try:
        val = constant(args.name, args.digits)
    except UnknownConstant:
        _fail(PARSE_ERROR, f"unknown constant {args.name!r}; see --list")
    with working_digits(args.digits + 5):
        text = mp_str(val.value, args.digits)
    if args.json:
        print(json.dumps({"name": args.name, "digits": args.digits, "value": text}))
    else:
        print(text)
    return 0


def cmd_verify(args):
    if not args.relation:
        _fail(PARSE_ERROR, "verify supports --relation")
    spec = _load_spec(args)
    basis = [b.strip() for b in args.basis.split(",") if b.strip()]
    try:
        res = evaluate_series(spec, digits=max(args.digits + 10, 30))
        value = (res.parts[args.part].value.real if args.part != "total"
                 else res.value.real)
        rel = find_relation(value, basis, digits=args.digits)
    except (EvaluationError, RuntimeError, ValueError) as exc:
        _fail(EVAL_ERROR, str(exc))
    out = {"spec": spec.to_json(), "part": args.part, "basis": basis,
           "relation": rel and {"value_coeff": rel["value_coeff"],
                                "coeffs": rel["coeffs"],
                                "residual": rel["residual"]}}
    if args.json:
        print(json.dumps(out, indent=2))
    elif rel is None:
        print("no relation found")
    else:
        terms = " + ".join(f"({c})*{n}" for n, c in rel["coeffs"].items())
        print(f"({rel['value_coeff']})*value + {terms} = 0   "
              f"[residual {rel['residual']:.1e}]")
    return 0


def cmd_selftest(args):
    results = run_suite(args.suite, args.filter)
    if args.json:
        print(json.dumps([{"name": r.name, "suite": r.suite, "ok": r.ok,
                           "detail": r.detail, "seconds": round(r.seconds, 2)}
                          for r in results], indent=2))
    else:
        for r in results:
            mark = "PASS" if r.ok else "FAIL"
            print(f"[{mark}] {r.suite}/{r.name} ({r.seconds:.1f}s): {r.detail}")
        n_bad = sum(1 for r in results if not r.ok)
        print(f"{len(results) - n_bad}/{len(results)} checks passed")
    return 0 if all(r.ok for r in results) else 1


def _add_spec_flags(p, with_engine=False):
    p.add_argument("spec", help='series spec, e.g. "n:2 >= o+:1 >= o-:1 > 0"')
    p.add_argument("--x2", default="1", help="evaluation point x^2 as p/q (default 1)")
    p.add_argument("--digits", type=int, default=40)
    p.add_argument("--alias-n", action="store_true",
                   help="read e-factors as plain-n factors (scale by 2^s)")
    p.add_argument("--bsq", action="store_true", help="square the binomial weight")
    p.add_argument("--json", action="store_true")
    if with_engine:
        p.add_argument("--engine", choices=["march", "sums", "both"], default="march")


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="aperycmzv",
        description="Compile Apery-type central-binomial series to level-4 "
                    "colored MZVs and evaluate them at arbitrary precision.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("eval", help="evaluate a series spec")
    _add_spec_flags(p, with_engine=True)
    p.add_argument("--stage", choices=["value", "cmzv"], default="value")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("compile", help="show a pipeline stage")
    _add_spec_flags(p)
    p.add_argument("--stage", default="omega",
                   choices=["parsed", "normalized", "omega", "x-alphabet", "cmzv"])
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("cmzv", help="shorthand for compile --stage cmzv")
    _add_spec_flags(p)
    p.set_defaults(fn=cmd_compile, stage="cmzv")

    p = sub.add_parser("catalog", help="print a reference constant")
    p.add_argument("--name")
    p.add_argument("--digits", type=int, default=40)
    p.add_argument("--list", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("verify", help="integer-relation checks")
    p.add_argument("--relation", action="store_true")
    _add_spec_flags(p)
    p.add_argument("--basis", default="zeta3,G",
                   help="comma-separated catalog names")
    p.add_argument("--part", choices=["total", "main", "head_diagonal"],
                   default="total")
    p.set_defaults(fn=cmd_verify, digits=22)

    p = sub.add_parser("selftest", help="run the acceptance/property suites")
    p.add_argument("--suite", choices=["golden", "properties", "all"], default="all")
    p.add_argument("--filter", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_selftest)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
