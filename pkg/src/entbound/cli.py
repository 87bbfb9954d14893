"""Command-line front end.

Exit codes: 0 ok, 2 parse or validation error, 3 tainted or unsound result,
4 verify-suite failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import __version__
from .bounds import ConjugateEvaluator, epsilon_bound
from .legendre import legendre_roof
from .oracle import certify, describe_state
from .paper import format_report, reproduce
from .problem import ProblemError, load_problem
from .verify import SUITES, run_suites

EXIT_OK, EXIT_PARSE, EXIT_TAINTED, EXIT_VERIFY = 0, 2, 3, 4


def _load(path, seed):
    try:
        prob = load_problem(path)
        return prob.with_seed(seed) if seed is not None else prob
    except OSError as exc:
        raise ProblemError(str(path), exc.strerror or str(exc)) from None


def _fmt(v, u=None):
    return f"{v:.4g}" if u is None else f"{v:.4g} ± {u:.2g}"


def _emit_json(obj):
    print(json.dumps(obj, sort_keys=True, indent=2))


def format_bound(prob, res) -> str:
    lines = [f"measure: {prob.measure_spec.measure.describe()}"]
    for rec in prob.records:
        lines.append(f"witness {rec.label}: measured {_fmt(rec.measured, rec.stderr or None)}")
    lines.append(f"epsilon = {_fmt(res.epsilon, res.uncertainty)}")
    lines.append("r* = (" + ", ".join(f"{x:.6g}" for x in res.r_star) + ")")
    lines.append(f"c* = {res.c_star:.10g}")
    if not any(res.r_star):
        lines.append("inner solver: not needed (r* = 0)")
    elif res.analytic:
        lines.append("inner solver: closed form")
    elif res.inner is not None:
        i = res.inner
        lines.append(f"inner solver: {'converged' if res.converged else 'NOT converged'}, "
                     f"{i['iterations']} iterations, {i['restarts']} restarts, "
                     f"restart spread {i['restart_spread']:.2e}")
    lines.append(f"evaluations: {res.evaluations} ({res.nonconverged_evaluations} not converged)")
    if res.audit is not None:
        lines.append("audit: " + res.audit.line())
    else:
        lines.append("audit: skipped")
    lines.append(f"certificate: {'valid' if res.certificate_valid else 'TAINTED'}")
    lines.extend(f"note: {n}" for n in res.notes)
    return "\n".join(lines)


def cmd_bound(args) -> int:
    prob = _load(args.file, args.seed)
    if args.dump_canonical:
        print(prob.canonical())
        return EXIT_OK
    search = dataclasses.replace(prob.search, threads=max(1, args.threads))
    res = epsilon_bound(prob.records, prob.measure_spec, prob.dims, search)
    seed = prob.measure_spec.solver.seed
    certify(res, prob.records, prob.measure_spec, prob.dims, audit=not args.no_audit,
            samples=args.samples, seed=seed)
    if args.json:
        _emit_json({"problem": prob.data, "measure": prob.measure_spec.measure.describe(),
                    "seed": seed, "result": res.to_dict()})
    else:
        print(format_bound(prob, res))
    return EXIT_OK if res.certificate_valid else EXIT_TAINTED


def cmd_legendre(args) -> int:
    prob = _load(args.file, args.seed)
    r = np.array(args.r, dtype=float)
    if r.size != len(prob.records):
        raise ProblemError("--r", f"need {len(prob.records)} slopes, got {r.size}")
    ev = ConjugateEvaluator(prob.records, prob.measure_spec, prob.dims)
    value = ev(r)
    analytic = ev.is_analytic(r)
    out = {"r": [float(x) for x in r], "c": float(value), "analytic": analytic,
           "measure": prob.measure_spec.measure.describe()}
    if np.any(r):
        lr = legendre_roof(ev.operator(r), prob.measure_spec.measure, prob.dims, prob.measure_spec.solver)
        out["iterative"] = lr.value
        out["converged"] = lr.converged
        out["maximizer"] = describe_state(lr.maximizer.amplitudes, prob.dims)
    else:
        out["iterative"], out["converged"] = 0.0, True
        out["maximizer"] = "any product state"
    if args.json:
        _emit_json(out)
    else:
        print(f"Ehat = {value:.10g}" + (" (closed form)" if analytic else ""))
        print("certificate: E(rho) >= " + " + ".join(f"({x:.6g}) w{k + 1}" for k, x in enumerate(r))
              + f" - {value:.10g}")
        if analytic:
            print(f"iterative value: {out['iterative']:.10g}")
        print(f"maximizer: {out['maximizer']}")
        if not out["converged"]:
            print("warning: inner solver did not converge")
    return EXIT_OK if out["converged"] else EXIT_TAINTED


def cmd_paper(args) -> int:
    report = reproduce(audit=args.audit, samples=args.samples, seed=args.seed, threads=max(1, args.threads))
    if args.json:
        _emit_json(report.to_dict())
    else:
        print(format_report(report))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suites(args.suite, negative=args.negative_control, samples=args.samples, seed=args.seed)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    suites = sorted({c.suite for c in checks})
    for s in suites:
        n = sum(1 for c in checks if c.suite == s)
        bad = sum(1 for c in failed if c.suite == s)
        print(f"{s}: {n - bad}/{n} passed")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entbound", description="Entanglement lower bounds from witness data.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="best lower bound for a problem file")
    b.add_argument("file")
    b.add_argument("--json", action="store_true")
    b.add_argument("--seed", type=int, default=None, help="overrides the solver seed in the file")
    b.add_argument("--no-audit", action="store_true")
    b.add_argument("--samples", type=int, default=None, help="audit sample count")
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--dump-canonical", action="store_true", help="print the canonical problem and exit")
    b.set_defaults(func=cmd_bound)

    pp = sub.add_parser("paper", help="reproduce the W-state experiment bounds")
    pp.add_argument("--json", action="store_true")
    pp.add_argument("--audit", action="store_true", help="audit every certificate")
    pp.add_argument("--samples", type=int, default=None)
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--threads", type=int, default=1)
    pp.set_defaults(func=cmd_paper)

    lg = sub.add_parser("legendre", help="conjugate value and affine certificate at given slopes")
    lg.add_argument("file")
    lg.add_argument("--r", type=float, nargs="+", required=True)
    lg.add_argument("--json", action="store_true")
    lg.add_argument("--seed", type=int, default=None)
    lg.set_defaults(func=cmd_legendre)

    v = sub.add_parser("verify", help="run oracle suites")
    v.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    v.add_argument("--negative-control", action="store_true")
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
