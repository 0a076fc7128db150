"""``fatcost`` command line.

Exit codes: 0 on success, 2 for input or usage errors, 3 for numerical
failures (empty tails, degenerate samples, optimizer non-convergence).
"""
from __future__ import annotations

import argparse
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import dataset, distfit, model_select, report, stats_core, tail_sim
from .errors import ConvergenceError, DataError, FatcostError, NumericalError

EXIT_OK, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3
FIGURES = ("ccdf", "cost-time", "athlete-time")
FIT_MODELS = ("lognormal", "pareto1", "gpd", "trunc-lognormal")
DEFAULT_XMIN = {"pareto1": "min", "trunc-lognormal": "auto", "gpd": "1.0"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DATA, f"{self.prog}: error: {message}\n")


def _load(path):
    """(table or None, overrun sample) from a games CSV, a ``value`` CSV or the bundled data."""
    if path is None:
        table = dataset.load_bundled()
        return table, dataset.overrun_ratios(table)
    if dataset.sniff_header(path) == dataset.SAMPLE_HEADER:
        return None, dataset.load_sample_csv(path)
    table = dataset.load_games_csv(path)
    return table, dataset.overrun_ratios(table)


def _xmin_value(text, x):
    if text == "auto":
        return distfit.select_xmin(x).xmin
    if text == "min":
        return float(np.min(x))
    try:
        return float(text)
    except ValueError:
        raise DataError(f"--xmin must be auto, min or a number, got {text!r}") from None


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _print_pairs(pairs, indent=""):
    width = max((len(k) for k, _ in pairs), default=0)
    for k, v in pairs:
        print(f"{indent}{k:<{width}}  {report.fmt(v)}")


# -- subcommands ------------------------------------------------------------------


def cmd_describe(args):
    table, sample = _load(args.input)
    if table is None:
        if args.filter != "all":
            raise DataError("--filter needs a games table; a bare sample has no seasons")
        overrun = stats_core.summary(sample, report.OVERRUN_THRESHOLDS)
        cost, units = None, None
    else:
        overrun = stats_core.summary(dataset.overrun_ratios(table, args.filter), report.OVERRUN_THRESHOLDS)
        values = [c for _, _, c in dataset.costs(table, args.filter)]
        cost = stats_core.summary(values) if values else None
        units = [u for u in dataset.derive_unit_costs(table) if args.filter in ("all", u.season)]

    if args.format == "json":
        out = {"filter": args.filter, "overrun": report.summary_record(overrun, ratios=True)}
        if table is not None:
            out["cost"] = report.summary_record(cost, ratios=False) if cost else None
            out["unit_costs"] = units
        _write(report.dumps(out), None)
        return EXIT_OK
    if args.format == "csv":
        rows = [("overrun_ratio", overrun)] + ([("cost_busd2015", cost)] if cost else [])
        _write(report.csv_text(
            ("measure", "n", "mean", "median", "sd", "min", "max"),
            [(m, s.n, s.mean, s.median, s.sd, s.min, s.max) for m, s in rows],
        ), None)
        return EXIT_OK

    print(f"cohort: {args.filter}")
    print("overrun (ratio actual/estimate):")
    _print_pairs([("n", overrun.n), ("mean", overrun.mean), ("median", overrun.median), ("sd", overrun.sd),
                  ("mean overrun %", (overrun.mean - 1) * 100), ("median overrun %", (overrun.median - 1) * 100)]
                 + [(f"share > {t:g}", p) for t, p in overrun.prop_above], "  ")
    if cost is not None:
        print("outturn cost (billion 2015 USD):")
        _print_pairs([("n", cost.n), ("mean", cost.mean), ("median", cost.median), ("sd", cost.sd)], "  ")
    if units:
        print("cost per event / per athlete (million 2015 USD):")
        for u in units:
            print(f"  {u.name:<28} {report.fmt(u.cost_per_event):>9} {report.fmt(u.cost_per_athlete):>9}")
    return EXIT_OK


def cmd_fit(args):
    _, sample = _load(args.input)
    x = dataset.as_array(sample)
    xmin_arg = args.xmin
    if args.model == "lognormal":
        if xmin_arg is not None:
            raise DataError("--xmin does not apply to the lognormal model; use trunc-lognormal")
        fit = distfit.fit_lognormal(x)
    else:
        xmin_arg = xmin_arg or DEFAULT_XMIN[args.model]
        if args.model == "pareto1" and xmin_arg == "auto":
            fit = distfit.select_xmin(x).fit
        else:
            xmin = _xmin_value(xmin_arg, x)
            fit = {
                "pareto1": distfit.fit_pareto_hill,
                "trunc-lognormal": distfit.fit_truncated_lognormal,
                "gpd": distfit.fit_gpd,
            }[args.model](x, xmin)
    rec = report.fit_record(fit, x)
    rec["xmin_rule"] = xmin_arg
    if args.format == "json":
        _write(report.dumps(rec), None)
        return EXIT_OK
    print(f"model: {rec['model']}")
    _print_pairs(sorted(rec["params"].items()) + [
        (k, rec[k]) for k in ("n", "log_likelihood", "ks_distance", "plug_in_mean", "excess_kurtosis", "implied_alpha")
        if k in rec
    ], "  ")
    return EXIT_OK


def cmd_compare(args):
    _, sample = _load(args.input)
    x = dataset.as_array(sample)
    xmin = _xmin_value(args.xmin, x)
    pareto = distfit.fit_pareto_hill(x, xmin)
    lognormal = distfit.fit_truncated_lognormal(x, xmin)
    res = model_select.vuong_test(x, lognormal, pareto, xmin)
    rec = {
        "xmin": xmin,
        "vuong": report.vuong_record(res),
        "lognormal": report.fit_record(lognormal),
        "pareto": report.fit_record(pareto),
    }
    if args.format == "json":
        _write(report.dumps(rec), None)
        return EXIT_OK
    print(f"Vuong test at xmin = {report.fmt(xmin)} (A = lognormal, B = pareto; r < 0 favors pareto)")
    _print_pairs([("r", res.r_normalized), ("p (two-sided)", res.p_two_sided), ("n_tail", res.n_tail),
                  ("favored", res.favored), ("pareto alpha", pareto.alpha),
                  ("lognormal mu", lognormal.mu), ("lognormal sigma", lognormal.sigma)], "  ")
    return EXIT_OK


def cmd_risk(args):
    if not 0 < args.risk < 1:
        raise DataError(f"--risk must lie in (0, 1), got {args.risk}")
    _, sample = _load(args.input)
    rec = report.risk_analysis(sample, args.risk, args.bound_L, args.bound_H, args.xmin)
    if args.format == "json":
        _write(report.dumps(rec), None)
        return EXIT_OK
    h = rec["heuristics"]
    print("mean estimates (ratio, overrun %):")
    for m in rec["means"]:
        value = float("inf") if m["value"] == "inf" else m["value"]
        overrun = float("inf") if m["overrun_pct"] == "inf" else m["overrun_pct"]
        print(f"  {m['method']:<20} {report.fmt(value):>10} {report.fmt(overrun):>10}")
    print(f"P(ratio >= 3) empirical: {report.fmt(h['p_threefold_empirical'])}")
    for name, p in h["p_threefold_by_model"].items():
        print(f"  {name:<22} {report.fmt(p)}")
    lo, hi = h["true_mean_range_pct"]
    print(f"mean overrun range %: {report.fmt(lo)} .. {report.fmt(hi)}")
    u = rec["selected_uplift"]
    print(f"uplift at risk {report.fmt(u['acceptable_risk'])}: empirical {report.fmt(u['empirical_uplift_pct'])}%, "
          f"lognormal {report.fmt(u['model_uplift_pct'])}%")
    for key in ("heuristic_1", "heuristic_2"):
        print(f"{key}: {h['verdicts'][key]}")
    for note in rec["notes"]:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    dist = tail_sim.SimDistribution.parse(args.dist)
    trace = tail_sim.running_mean_experiment(dist, args.horizon, args.runs, args.seed, workers=args.workers)
    if args.out is None:
        sys.stdout.write(trace.summary_json())
        return EXIT_OK
    out = Path(args.out)
    out.write_text(trace.to_csv(), encoding="utf-8")
    out.with_suffix(".json").write_text(trace.summary_json(), encoding="utf-8")
    return EXIT_OK


def cmd_plotdata(args):
    table, sample = _load(args.input)
    x = dataset.as_array(sample)
    if args.figure == "ccdf":
        xm = args.xmin if args.xmin in ("auto", "min") else _xmin_value(args.xmin, x)
        pareto = report._tail_fit(x, xm)
        _write(report.csv_text(report.CCDF_HEADER, report.ccdf_rows(x, pareto, distfit.fit_lognormal(x))), args.out)
        return EXIT_OK
    if table is None:
        raise DataError(f"figure {args.figure!r} needs a games table, not a bare sample")
    rows = report.time_rows(table, args.figure)
    _write(report.csv_text(report.TIME_HEADER, rows), args.out)
    if args.figure == "athlete-time" and args.out is not None:
        out = Path(args.out)
        sibling = out.with_name(f"{out.stem}-without-outlier{out.suffix or '.csv'}")
        sibling.write_text(report.csv_text(report.TIME_HEADER, report.drop_outlier(rows)), encoding="utf-8")
    return EXIT_OK


def cmd_report(args):
    table, sample = _load(args.input)
    bundle = report.build_report(table, sample, seed=args.seed, xmin=args.xmin)
    files = {"report.json": report.dumps(bundle), **report.plot_tables(table, sample)}
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".fatcost-", dir=out.parent))
    created = not out.exists()
    moved = []
    try:
        for name, text in files.items():
            (staging / name).write_text(text, encoding="utf-8")
        out.mkdir(exist_ok=True)
        for name in files:
            (staging / name).replace(out / name)
            moved.append(out / name)
    except BaseException:
        for path in moved:
            path.unlink(missing_ok=True)
        if created:
            shutil.rmtree(out, ignore_errors=True)
        raise
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    print(f"wrote {len(files)} files to {out}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fatcost", description="Fat-tail analysis of cost overruns.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(sp):
        sp.add_argument("input", nargs="?", help="games CSV or single-column 'value' CSV (default: bundled data)")
        return sp

    def with_format(sp, choices=("text", "json")):
        sp.add_argument("--format", choices=choices, default="text")

    sp = with_input(sub.add_parser("describe", help="cohort summaries and unit costs"))
    sp.add_argument("--filter", choices=("all", "summer", "winter"), default="all")
    with_format(sp, ("text", "json", "csv"))
    sp.set_defaults(func=cmd_describe)

    sp = with_input(sub.add_parser("fit", help="fit one tail model"))
    sp.add_argument("--model", choices=FIT_MODELS, required=True)
    sp.add_argument("--xmin", help="auto, min or a number (gpd: threshold)")
    with_format(sp)
    sp.set_defaults(func=cmd_fit)

    sp = with_input(sub.add_parser("compare", help="Vuong test, lognormal vs Pareto tail"))
    sp.add_argument("--xmin", default="auto", help="auto, min or a number")
    with_format(sp)
    sp.set_defaults(func=cmd_compare)

    sp = with_input(sub.add_parser("risk", help="mean estimates, heuristics and budget uplift"))
    sp.add_argument("--risk", type=float, default=0.2, help="acceptable overrun risk in (0, 1)")
    sp.add_argument("--bound-L", dest="bound_L", type=float, default=1.0)
    sp.add_argument("--bound-H", dest="bound_H", type=float, default=10.0)
    sp.add_argument("--xmin", type=float, default=report.FIXED_TAIL_XMIN, help="tail cutoff for Pareto means")
    with_format(sp)
    sp.set_defaults(func=cmd_risk)

    sp = sub.add_parser("simulate", help="running-mean Monte Carlo trace")
    sp.add_argument("--dist", required=True, help="pareto:ALPHA:XMIN, lognormal:MU:SIGMA or gaussian:MEAN:SD")
    sp.add_argument("--horizon", type=int, default=1000)
    sp.add_argument("--runs", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", help="trace CSV path; the JSON summary goes next to it")
    sp.set_defaults(func=cmd_simulate)

    sp = with_input(sub.add_parser("plotdata", help="plot-ready CSV for one figure"))
    sp.add_argument("--figure", choices=FIGURES, required=True)
    sp.add_argument("--xmin", default="auto", help="Pareto cutoff for the ccdf figure")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_plotdata)

    sp = with_input(sub.add_parser("report", help="full analysis bundle plus plot data"))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="report")
    sp.add_argument("--xmin", type=float, default=report.FIXED_TAIL_XMIN, help="fixed tail cutoff")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"fatcost: {exc}", file=sys.stderr)
        print(f"fatcost: diagnostics {report.dumps(exc.diagnostics).strip()}", file=sys.stderr)
        return EXIT_NUMERIC
    except NumericalError as exc:
        print(f"fatcost: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, FatcostError) as exc:
        print(f"fatcost: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"fatcost: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
