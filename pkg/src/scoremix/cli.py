"""Command-line interface: ``scoremix <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from . import csvio, inference, mixtures, murphy, simspace, svg
from .crps import StepCdf, crps_as_brier_integral, crps_step_cdf
from .errors import DataError, DomainError, InsufficientDataError, QuadratureError, ScoremixError
from .murphy import FunctionalSpec

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _level(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return v


def _lags(text: str):
    if text == "auto":
        return "auto"
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'auto' or a nonnegative integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError("lags must be nonnegative")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="scoremix", description="Murphy diagrams and elementary-score tools for point forecasts.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, data=True, fmts=("csv", "json", "svg")):
        if data:
            sp.add_argument("--input", required=True, help="wide CSV with an outcome column y")
            sp.add_argument("--columns", help="comma-separated forecaster columns")
        sp.add_argument("--functional", choices=("quantile", "expectile", "probability"), default="quantile")
        sp.add_argument("--alpha", type=_level, default=0.5)
        sp.add_argument("--format", choices=fmts, default=fmts[0])
        sp.add_argument("--output", "-o", help="output file (default: standard output)")

    common(sub.add_parser("murphy", help="empirical Murphy curves"))
    common(sub.add_parser("dominance", help="finite-knot dominance verdict for two columns"), fmts=("json",))
    dm = sub.add_parser("dmtest", help="score difference curve with pointwise DM bands")
    common(dm)
    dm.add_argument("--band", type=_level, default=0.95, help="band coverage level")
    dm.add_argument("--hac-lags", type=_lags, default="auto")
    dm.add_argument("--grid", type=int, default=0, help="extra equispaced thresholds across the support")

    sim = sub.add_parser("simulate", help="expected scores in the four-forecaster prediction space")
    common(sim, data=False)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--draws", type=_positive_int, default=100_000)
    sim.add_argument("--grid", type=_positive_int, default=41, help="number of thresholds")
    sim.add_argument("--threshold", type=float, default=simspace.DEFAULT_EVENT_THRESHOLD, help="event threshold y0")

    vm = sub.add_parser("verify-mixture", help="check mixture representations on random pairs")
    vm.add_argument("--family", choices=("apl", "ase", "exp-bregman", "homogeneous", "brier"), default="apl")
    vm.add_argument("--param", type=float, help="a for exp-bregman, b for homogeneous")
    vm.add_argument("--alpha", type=_level, default=0.5)
    vm.add_argument("--pairs", type=_positive_int, default=100)
    vm.add_argument("--seed", type=int, default=0)
    vm.add_argument("--tol", type=float, default=1e-9)
    vm.add_argument("--format", choices=("csv", "json"), default="csv")
    vm.add_argument("--output", "-o")

    cr = sub.add_parser("crps", help="CRPS of equally weighted ensembles, two ways")
    cr.add_argument("--input", required=True, help="CSV with outcome column y; other columns are ensemble members")
    cr.add_argument("--format", choices=("csv", "json"), default="csv")
    cr.add_argument("--output", "-o")
    return p


def _functional(args) -> FunctionalSpec:
    return FunctionalSpec(args.functional, args.alpha)


def _columns(args) -> Optional[list[str]]:
    if args.columns is None:
        return None
    cols = [c.strip() for c in args.columns.split(",") if c.strip()]
    if not cols:
        raise UsageError("--columns selects no forecasters")
    return cols


def _pair(args, data) -> tuple[int, int]:
    if data.l != 2:
        raise UsageError(f"{args.command} needs exactly two columns, got {data.l}")
    return 0, 1


def _emit(args, out, header, rows, meta, chart=None, **extra):
    if args.format == "json":
        csvio.write_json(out, meta, header, rows, **extra)
    elif args.format == "svg":
        out.write(chart())
    else:
        csvio.write_csv(out, header, rows)


def _meta(args, **more) -> dict:
    meta = {k: v for k, v in vars(args).items() if k not in ("output",) and v is not None}
    meta.update(more)
    return meta


def cmd_murphy(args, out) -> int:
    f = _functional(args)
    data = csvio.load_csv(args.input, f, _columns(args))
    curves = [murphy.empirical_curve(data, j) for j in range(data.l)]
    theta = np.unique(np.concatenate([c.knots for c in curves]))
    values = [np.atleast_1d(c(theta)) for c in curves]
    lefts = [np.atleast_1d(c.left(theta)) for c in curves]
    header = ["theta"] + list(data.names) + [f"{n}_left" for n in data.names]
    rows = [[t] + [v[k] for v in values] + [lv[k] for lv in lefts] for k, t in enumerate(theta)]

    def chart():
        series = [svg.Series(n, theta, v, lv) for n, v, lv in zip(data.names, values, lefts)]
        return svg.render(series, f"Murphy diagram, {f.label()}", "theta", "mean elementary score")

    _emit(args, out, header, rows, _meta(args, n=data.n, functional_label=f.label()), chart)
    return EXIT_OK


def cmd_dominance(args, out) -> int:
    f = _functional(args)
    data = csvio.load_csv(args.input, f, _columns(args))
    j1, j2 = _pair(args, data)
    v = murphy.dominance_check(data, j1, j2)
    rows = [(t, side, d) for t, side, d in v.evaluations]
    extra = {"verdict": v.verdict.value, "first": data.names[0], "second": data.names[1]}
    if v.verdict is murphy.Verdict.NO_DOMINANCE:
        extra.update(witness_first=v.witness_first, witness_second=v.witness_second)
    csvio.write_json(out, _meta(args, n=data.n), ["theta", "side", "difference"], rows, **extra)
    return EXIT_OK


def cmd_dmtest(args, out) -> int:
    f = _functional(args)
    data = csvio.load_csv(args.input, f, _columns(args))
    j1, j2 = _pair(args, data)
    ks = murphy.knot_set(data, j1, j2)
    thetas = ks.points
    if args.grid < 0:
        raise UsageError("--grid must be nonnegative")
    if args.grid and thetas.size >= 2:
        thetas = np.unique(np.concatenate([thetas, np.linspace(thetas[0], thetas[-1], args.grid)]))
    if data.n < 2:
        print("scoremix: n < 2, Diebold-Mariano inference refused; emitting the difference curve only", file=sys.stderr)
    rows_b = inference.confidence_band(data, j1, j2, thetas, level=args.band, lags=args.hac_lags)
    header = ["theta", "D_n", "lower", "upper", "statistic", "p_value", "status"]
    rows = [(r.theta, r.diff, r.lower, r.upper, r.statistic, r.p_value, r.status) for r in rows_b]
    flagged = sum(r.status == "degenerate" for r in rows_b)
    if flagged:
        print(f"scoremix: {flagged} thresholds with zero score-difference variance (status 'degenerate')", file=sys.stderr)

    def chart():
        t = np.array([r.theta for r in rows_b])
        d = svg.Series(f"{data.names[0]} - {data.names[1]}", t, np.array([r.diff for r in rows_b]))
        band = svg.Band(t, np.array([r.lower for r in rows_b]), np.array([r.upper for r in rows_b]))
        return svg.render([d], f"Score difference, {f.label()}, {args.band:g} band", "theta", "D_n(theta)", band)

    _emit(args, out, header, rows, _meta(args, n=data.n), chart)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    f = _functional(args)
    if f.kind == "expectile" and f.alpha != 0.5:
        raise UsageError("the prediction space supports the mean (--alpha 0.5) among expectiles")
    if args.draws < 2:
        raise UsageError("--draws must be at least 2")
    if f.kind == "probability":
        thetas = np.linspace(0.0, 1.0, args.grid + 2)[1:-1]
    else:
        thetas = np.linspace(-4.0, 4.0, args.grid)
    scen = simspace.sample_scenarios(args.draws, args.seed)
    header = ["kind", "functional", "theta", "analytic", "mc_estimate", "mc_se"]
    rows, curves = [], {}
    for kind in simspace.ForecasterKind:
        col = []
        for t in thetas:
            exact = None if f.kind == "probability" else simspace.analytic_expected_score(kind, f, t)
            est, se = simspace.monte_carlo_expected_score(kind, f, t, event_threshold=args.threshold, scenarios=scen)
            rows.append((kind.value, f.label(), t, exact, est, se))
            col.append(est if exact is None else exact)
        curves[kind.value] = np.array(col)

    def chart():
        series = [svg.Series(k, thetas, v) for k, v in curves.items()]
        return svg.render(series, f"Expected elementary scores, {f.label()}", "theta", "expected score")

    _emit(args, out, header, rows, _meta(args), chart)
    return EXIT_OK


def _mixture_case(args, rng):
    fam, a = args.family, args.alpha
    if fam == "apl":
        x, y = rng.uniform(-10, 10, 2)
        return x, y, lambda: mixtures.verify_mixture_quantile(mixtures.constant_density(1.0), a, x, y, args.tol)
    if fam == "ase":
        x, y = rng.uniform(-10, 10, 2)
        return x, y, lambda: mixtures.verify_mixture_expectile(mixtures.constant_density(2.0), a, x, y, args.tol)
    if fam == "exp-bregman":
        x, y = rng.uniform(-10, 10, 2)
        dens = mixtures.exponential_density(args.param)
        return x, y, lambda: mixtures.verify_mixture_expectile(dens, a, x, y, args.tol)
    if fam == "homogeneous":
        x, y = rng.uniform(0.01, 10, 2)
        dens = mixtures.homogeneous_density(args.param)
        return x, y, lambda: mixtures.verify_mixture_expectile(dens, a, x, y, args.tol)
    p, yb = float(rng.uniform()), int(rng.integers(0, 2))
    return p, yb, lambda: mixtures.verify_mixture_probability(mixtures.constant_density(2.0), p, yb, args.tol)


def cmd_verify_mixture(args, out) -> int:
    if args.family in ("exp-bregman", "homogeneous") and args.param is None:
        raise UsageError(f"--family {args.family} needs --param")
    if args.family == "exp-bregman" and args.param == 0:
        raise UsageError("exp-bregman needs a nonzero --param")
    rng = np.random.default_rng(args.seed)
    rows, failures, max_err = [], 0, 0.0
    for _ in range(args.pairs):
        x, y, run = _mixture_case(args, rng)
        try:
            r = run()
        except QuadratureError as exc:
            failures += 1
            print(f"scoremix: pair ({x!r}, {y!r}): {exc}", file=sys.stderr)
            rows.append((x, y, None, None, None, "quadrature_failed"))
            continue
        max_err = max(max_err, r.abs_error)
        failures += not r.ok
        rows.append((x, y, r.lhs, r.rhs, r.abs_error, "ok" if r.ok else "mismatch"))
    header = ["x", "y", "lhs", "rhs", "abs_error", "status"]
    if args.format == "json":
        csvio.write_json(out, _meta(args), header, rows, max_abs_error=max_err, failures=failures)
    else:
        csvio.write_csv(out, header, rows)
    print(f"scoremix: max abs_error {max_err:.3e} over {args.pairs} pairs, {failures} failures", file=sys.stderr)
    return EXIT_NUMERIC if failures else EXIT_OK


def cmd_crps(args, out) -> int:
    header, values = csvio.read_table(args.input)
    if csvio.OUTCOME_COLUMN not in header:
        raise DataError(f"missing outcome column {csvio.OUTCOME_COLUMN!r}")
    k = header.index(csvio.OUTCOME_COLUMN)
    members = np.delete(values, k, axis=1)
    if members.shape[1] == 0:
        raise DataError("no ensemble member columns")
    w = np.full(members.shape[1], 1.0 / members.shape[1])
    rows = []
    for i, (y, ens) in enumerate(zip(values[:, k], members), start=1):
        F = StepCdf.from_atoms(ens, w)
        a, b = crps_step_cdf(F, y), crps_as_brier_integral(F, y)
        rows.append((i, y, a, b, abs(a - b)))
    cols = ["row", "y", "crps", "crps_threshold_integral", "abs_difference"]
    if args.format == "json":
        csvio.write_json(out, _meta(args), cols, rows)
    else:
        csvio.write_csv(out, cols, rows)
    return EXIT_OK


COMMANDS = {
    "murphy": cmd_murphy,
    "dominance": cmd_dominance,
    "dmtest": cmd_dmtest,
    "simulate": cmd_simulate,
    "verify-mixture": cmd_verify_mixture,
    "crps": cmd_crps,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits for --help (0) and usage errors (1)
        return int(exc.code or 0)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as out:
                return COMMANDS[args.command](args, out)
        return COMMANDS[args.command](args, sys.stdout)
    except (UsageError, DomainError) as exc:
        print(f"scoremix: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, InsufficientDataError, OSError) as exc:
        print(f"scoremix: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (QuadratureError, ArithmeticError, ScoremixError) as exc:
        print(f"scoremix: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
