"""Batch command-line front end: scenario files in, CSV tables out.

Subcommands: approx, simulate, compare, check-conditions, risk, eta,
validate-scenario.  Exit codes: 0 success, 1 usage error, 2 validation
error, 3 numeric failure.  Identical invocations (same flags, seed,
workers) produce byte-identical CSV.  ``--scenario template:<name>``
resolves one of the shipped templates.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from .aggregation import sample_lc
from .asymptotics import approx
from .dependence import eta as eta_constant
from .errors import NumericError, OrdertailError, ValidationError
from .marginals import MdaClass
from .montecarlo import (
    DiagnosticsConfig,
    check_conditions,
    conditional_c1,
    crude,
    importance_pareto,
    substream,
    tail_curve,
)
from .riskmeasures import es_asymptotic, es_empirical, var_asymptotic, var_empirical
from .scenario_io import load_scenario

_METHODS = {"crude": crude, "conditional": conditional_c1, "is": importance_pareto}
_DEFAULT_SAMPLES = {"crude": 1_000_000, "conditional": 100_000, "is": 100_000}


class _UsageError(Exception):
    def __init__(self, parser, message):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures reported as exit code 1 plus help text."""

    def error(self, message):
        raise _UsageError(self, message)


def _prob(value):
    """Probability in decimal scientific notation, 10 significant digits."""
    return f"{value:.9e}"


def _num(value):
    return f"{value:.10g}"


def _parse_seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("t-grid must look like from:to:points")
    lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    if not (lo > 0 and hi > lo and points >= 2):
        raise argparse.ArgumentTypeError(
            "t-grid needs 0 < from < to and points >= 2")
    return np.geomspace(lo, hi, points)


def _add_common(sub, samples=True):
    sub.add_argument("--scenario", required=True,
                     help="scenario JSON file (or template:<name>)")
    sub.add_argument("--seed", type=_parse_seed, default=0)
    sub.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    if samples:
        sub.add_argument("--samples", type=int, default=None)
        sub.add_argument("--method", choices=sorted(_METHODS), default="crude")
    sub.add_argument("--out", default=None, help="output file (default stdout)")
    sub.add_argument("--quiet", action="store_true")


def _build_parser():
    parser = _Parser(prog="ordertail",
                     description="Tail asymptotics for randomly weighted "
                                 "order-statistic aggregates")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("approx", parents=[], help="closed-form tail approximation")
    _add_common(p, samples=False)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--log-space", action="store_true")

    p = subs.add_parser("simulate", help="Monte Carlo tail estimate at one level")
    _add_common(p)
    p.add_argument("--t", type=float, required=True)

    p = subs.add_parser("compare", help="estimate vs approximation on a t-grid")
    _add_common(p)
    p.add_argument("--t-grid", type=_parse_grid, required=True,
                   help="geometric grid from:to:points")
    p.add_argument("--log-space", action="store_true")

    p = subs.add_parser("check-conditions",
                        help="asymptotic-independence condition ratios")
    _add_common(p, samples=False)
    p.add_argument("--t-grid", type=_parse_grid, default=None)

    p = subs.add_parser("risk", help="asymptotic (and optional empirical) VaR/ES")
    _add_common(p)
    p.add_argument("--p", required=True,
                   help="comma-separated probability levels, e.g. 0.99,0.999")

    p = subs.add_parser("eta", help="bivariate log-normal joint-tail constant")
    p.add_argument("--rho", type=float, required=True)

    p = subs.add_parser("validate-scenario", help="check a scenario file")
    p.add_argument("--scenario", required=True)

    return parser


def _open_out(args):
    if args.out is None:
        return sys.stdout, False
    return open(args.out, "w", encoding="utf-8", newline=""), True


def _write_rows(args, header, rows):
    stream, owned = _open_out(args)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if owned:
            stream.close()


def _note(args, message):
    if not getattr(args, "quiet", False):
        print(message, file=sys.stderr)


def _cmd_approx(args):
    scenario, _ = load_scenario(args.scenario)
    report = approx(scenario, args.t)
    value = report.log_value if args.log_space else report.value
    value_str = _num(value) if args.log_space else _prob(value)
    _write_rows(args, ["t", "approx", "formula", "caveats"],
                [[_num(args.t), value_str, report.formula.value,
                  "; ".join(report.caveats)]])
    for caveat in report.caveats:
        _note(args, f"note: {caveat}")
    return 0


def _run_estimator(args, scenario, t):
    method = _METHODS[args.method]
    n_samples = args.samples or _DEFAULT_SAMPLES[args.method]
    return method(scenario, t, n_samples, args.seed, args.workers)


def _cmd_simulate(args):
    scenario, _ = load_scenario(args.scenario)
    est = _run_estimator(args, scenario, args.t)
    row = [_num(args.t), _prob(est.point), _prob(est.stderr),
           _prob(est.ci95[0]), _prob(est.ci95[1]), est.method,
           str(est.n_samples), str(est.seed), str(est.workers),
           _num(est.ess) if est.ess is not None else ""]
    _write_rows(args, ["t", "estimate", "stderr", "ci_lo", "ci_hi", "method",
                       "n_samples", "seed", "workers", "ess"], [row])
    return 0


def _cmd_compare(args):
    scenario, diag = load_scenario(args.scenario)
    cfg_kwargs = {"t_grid": args.t_grid}
    if diag is not None:
        cfg_kwargs.update(l_default=diag.l_default, l_pairs=diag.l_pairs,
                          x_values=diag.x_values)
    cfg = DiagnosticsConfig(**cfg_kwargs)
    n_samples = args.samples or _DEFAULT_SAMPLES[args.method]
    rows = tail_curve(scenario, cfg, method=args.method, n_samples=n_samples,
                      seed=args.seed, workers=args.workers)
    out = []
    for row in rows:
        est = row.estimate
        if args.log_space:
            est_str = _num(math.log(est.point)) if est.point > 0 else "-inf"
            approx_str = _num(row.approx.log_value)
        else:
            est_str = _prob(est.point)
            approx_str = _prob(row.approx.value)
        out.append([_num(row.t), est_str, _prob(est.stderr),
                    _prob(est.ci95[0]), _prob(est.ci95[1]), approx_str,
                    _num(row.ratio), _num(row.ratio_ci[0]),
                    _num(row.ratio_ci[1]), "; ".join(row.caveats)])
    _write_rows(args, ["t", "estimate", "stderr", "ci_lo", "ci_hi", "approx",
                       "ratio", "ratio_ci_lo", "ratio_ci_hi", "caveats"], out)
    return 0


def _cmd_check_conditions(args):
    scenario, diag = load_scenario(args.scenario)
    cfg = diag or DiagnosticsConfig()
    if args.t_grid is not None:
        cfg = DiagnosticsConfig(t_grid=args.t_grid, l_default=cfg.l_default,
                                l_pairs=cfg.l_pairs, x_values=cfg.x_values,
                                n_draws=cfg.n_draws)
    report = check_conditions(scenario, cfg, seed=args.seed)
    rows = []
    for series in report.series:
        for t, ratio in zip(series.ts, series.ratios):
            rows.append([series.condition, str(series.i), str(series.j),
                         _num(series.param) if series.param is not None else "",
                         _num(t), _prob(ratio), series.verdict])
    _write_rows(args, ["condition", "i", "j", "param", "t", "ratio", "verdict"],
                rows)
    for note in report.notes:
        _note(args, f"note: {note}")
    _note(args, f"overall: {report.overall}")
    return 0


def _cmd_risk(args):
    scenario, _ = load_scenario(args.scenario)
    try:
        levels = [float(part) for part in args.p.split(",") if part]
    except ValueError:
        raise ValidationError(f"--p must be a comma-separated list, got {args.p!r}")
    if not levels:
        raise ValidationError("--p must contain at least one level")
    empirical = None
    if args.samples:
        gen = substream(args.seed, 0)
        empirical = sample_lc(scenario, gen, args.samples)
    rows = []
    for p in levels:
        var = var_asymptotic(scenario, p)
        if scenario.mda_class is MdaClass.GUMBEL:
            es_value = _num(es_asymptotic(scenario, p).value)
        else:
            es_value = ""
        var_emp = es_emp = ""
        if empirical is not None:
            var_emp = _num(var_empirical(empirical, p))
            es_emp = _num(es_empirical(empirical, p))
        rows.append([_num(p), _num(var.value), es_value, var.rule,
                     _num(var.approx_root), var_emp, es_emp,
                     "; ".join(var.flags)])
        for flag in var.flags:
            _note(args, f"note: {flag}")
    _write_rows(args, ["p", "var_asymptotic", "es_asymptotic", "rule",
                       "approx_root", "var_empirical", "es_empirical", "flags"],
                rows)
    return 0


def _cmd_eta(args):
    print(_num(eta_constant(args.rho)))
    return 0


def _cmd_validate(args):
    load_scenario(args.scenario)
    print("ok")
    return 0


_COMMANDS = {
    "approx": _cmd_approx,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "check-conditions": _cmd_check_conditions,
    "risk": _cmd_risk,
    "eta": _cmd_eta,
    "validate-scenario": _cmd_validate,
}


def run(argv):
    """Entry point used by tests; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        exc.parser.print_help(sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OrdertailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
