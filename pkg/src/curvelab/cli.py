"""Command-line front end: ``curvelab analyze|semigroup|lambda|experiment``."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (CurveLabError, DegenerateInput, InvalidElimination, InvalidParametrization, NonReducedInput,
                     SpecParseError, TruncationTooSmall, UnsupportedCoefficientField)
from .exactalg import configure_primes
from .invariants import NotApplicable, verify_all
from .specfile import build_curve, load_spec, parse_spec
from .valmod import kahler_module, ring_module, thetas

SCHEMA = "curvelab.report"
SCHEMA_VERSION = "1"

EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 1, 2

INPUT_ERRORS = (SpecParseError, InvalidParametrization, NonReducedInput, DegenerateInput, UnsupportedCoefficientField,
                TruncationTooSmall, InvalidElimination, OSError)


def _envelope(command: str, name: str, body: dict) -> dict:
    return {"schema": SCHEMA, "schema_version": SCHEMA_VERSION, "command": command, "curve": name, **body}


def _curve(args, spec):
    precision = args.truncation or spec.options.get("truncation_cap")
    primes = spec.options.get("modular_primes")
    if primes:
        configure_primes(seed=args.seed, primes=primes)
    return build_curve(spec, int(precision) if precision else None)


def _oracle_enabled(args, spec) -> bool:
    if args.oracle is not None:
        return args.oracle == "on"
    return spec.oracle


def cmd_analyze(args) -> tuple:
    spec = load_spec(args.spec)
    curve = _curve(args, spec)
    rep = verify_all(curve, oracle=_oracle_enabled(args, spec), branch_oracle=_oracle_enabled(args, spec),
                     jobs=args.jobs)
    body = {
        "report": rep.to_json(),
        "value_sets": {k: v.to_json() for k, v in sorted(rep.value_sets.items())},
        "verdict": "pass" if rep.passed else "fail",
    }
    lines = [
        f"curve {curve.name or '-'}: r={rep.r} mu={rep.mu} delta={rep.delta} c_S={list(rep.c_S)}",
        f"tau_berger={rep.tau_berger} tau_closed="
        f"{'NotApplicable' if rep.tau_closed is NotApplicable else rep.tau_closed} tau_oracle={rep.tau_oracle}",
        f"branch tau={rep.tau_branches}",
    ]
    lines += [f"  {k}: {v}" for k, v in sorted(rep.verdicts.items())]
    lines += [f"  {k}: skipped ({v})" for k, v in sorted(rep.skipped.items())]
    return _envelope("analyze", curve.name, body), lines, EXIT_OK if rep.passed else EXIT_FAILED


def cmd_semigroup(args) -> tuple:
    spec = load_spec(args.spec)
    curve = _curve(args, spec)
    S = ring_module(curve).value_set()
    body = {
        "branches": [c.as_dict() for c in curve.chars],
        "intersections": [{"i": i, "j": j, "I": v} for (i, j), v in sorted(curve.intersections().items())],
        "c_S": list(curve.semigroup_conductor()),
        "S": S.to_json(),
    }
    lines = [f"branch {i}: beta_bar={list(c.beta_bar)} conductor={c.conductor}" for i, c in enumerate(curve.chars)]
    lines += [f"I({i},{j})={v}" for (i, j), v in sorted(curve.intersections().items())]
    lines.append(f"c_S={list(curve.semigroup_conductor())}")
    return _envelope("semigroup", curve.name, body), lines, EXIT_OK


def cmd_lambda(args) -> tuple:
    spec = load_spec(args.spec)
    curve = _curve(args, spec)
    KM = kahler_module(curve)
    L = KM.value_set()
    th = thetas(curve, KM, L)
    body = {"Lambda": L.to_json(), "conductor": list(L.conductor()), "theta": th,
            "minimum": list(L.minimum())}
    lines = [f"Lambda: conductor={list(L.conductor())} minimum={list(L.minimum())} theta={th}"]
    return _envelope("lambda", curve.name, body), lines, EXIT_OK


def _extra_row(entry: dict, k: int, args) -> dict:
    spec = parse_spec(entry, entry.get("name", f"extra-{k}"))
    curve = _curve(args, spec)
    rep = verify_all(curve, oracle=spec.oracle)
    row = {"instance": spec.name, "I_target": None, "tau_berger": rep.tau_berger, "tau_oracle": rep.tau_oracle,
           "tau_closed": None if rep.tau_closed is NotApplicable else rep.tau_closed,
           "tau_branches": rep.tau_branches, "verdicts_pass": rep.passed}
    if curve.r == 2:
        row["I"] = row["I_target"] = curve.intersection(0, 1)
    return row


def cmd_experiment(args) -> tuple:
    from .experiment import parse_family, run_family

    try:
        with open(args.spec, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    fam = parse_family(data)
    extra = [_extra_row(e, k, args) for k, e in enumerate(data.get("extra", []))]
    if args.oracle is not None:
        fam = type(fam)(**{**fam.__dict__, "oracle": args.oracle == "on"})
    seed = args.seed if args.seed is not None else int(data.get("seed", 0))
    out = run_family(fam, seed=seed, jobs=args.jobs, extra_rows=extra)
    lines = [f"{'instance':<28} {'I':>5} {'tau_berger':>10} {'tau_oracle':>10}"]
    for r in out["rows"]:
        if "error" in r:
            lines.append(f"{r['instance']:<28} {r['I_target']!s:>5} error: {r['error']}")
        else:
            lines.append(f"{r['instance']:<28} {r.get('I')!s:>5} {r['tau_berger']!s:>10} {r['tau_oracle']!s:>10}")
    for s in out["summary"]:
        lines.append(f"I={s['I']}: tau values {s['tau_values']}"
                     + (f", closed formula {s['closed_formula']}" if "closed_formula" in s else
                        f", conjectured minimum {s['conjectured_min']}"))
    bad = any("error" in r or not r.get("verdicts_pass", True) for r in out["rows"])
    return _envelope("experiment", fam.name, out), lines, EXIT_FAILED if bad else EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "semigroup": cmd_semigroup, "lambda": cmd_lambda, "experiment": cmd_experiment}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvelab", description="Invariants of plane curve singularities.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("spec", help="curve spec (analyze, semigroup, lambda) or family descriptor (experiment), JSON")
    ap.add_argument("--out", help="write the JSON report to this file")
    ap.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    ap.add_argument("--seed", type=int, default=None, help="seed for modular primes and random instances")
    ap.add_argument("--truncation", type=int, default=None, help="series precision for Puiseux expansions")
    ap.add_argument("--oracle", choices=("on", "off"), default=None, help="run the colength oracles")
    ap.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    return ap


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    configure_primes(seed=args.seed if args.seed is not None else 0)
    try:
        report, lines, code = COMMANDS[args.command](args)
    except INPUT_ERRORS as exc:
        msg = str(exc)
        if isinstance(exc, TruncationTooSmall) and exc.attempted is not None:
            msg += f" (attempted T={exc.attempted}; raise --truncation)"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except CurveLabError as exc:
        print(f"check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
