"""Assembling analyses into JSON-ready records and plot-ready tables.

JSON conventions: keys sorted, floats in shortest round-trip form, and the
non-finite values ``inf``, ``-inf`` and ``nan`` written as strings so the
output stays strict JSON.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from typing import Any, Callable

import numpy as np

from . import dataset, distfit, model_select, stats_core, tail_risk, tail_sim
from .distfit import GpdFit, LognormalFit, ParetoFit
from .errors import DataError, DegenerateSampleError, EmptyTailError, FatcostError

FIXED_TAIL_XMIN = 1.494919
UPLIFT_RISKS = (0.5, 0.3, 0.2, 0.1)
OVERRUN_THRESHOLDS = (1.5, 2.0, 3.0)
INSUFFICIENT_TAIL = "insufficient tail"
SCHEMA_VERSION = 1


# -- serialization -------------------------------------------------------------


def jsonable(obj: Any) -> Any:
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def fmt(v) -> str:
    """Human-readable number with 6 significant digits."""
    if v is None:
        return "-"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if c is None else repr(float(c)) if isinstance(c, (float, np.floating)) else c for c in row])
    return buf.getvalue()


# -- records -------------------------------------------------------------------


def summary_record(s: stats_core.SummaryStats, *, ratios: bool) -> dict:
    out = jsonable(s)
    out["prop_above"] = {repr(t): p for t, p in s.prop_above}
    if ratios:
        out["mean_overrun_pct"] = (s.mean - 1.0) * 100.0
        out["median_overrun_pct"] = (s.median - 1.0) * 100.0
    return out


def fit_record(fit, sample=None) -> dict:
    """Parameters, log-likelihood and goodness of fit for one fitted model."""
    rec = {"model": fit.kind, "params": fit.params(), "log_likelihood": fit.log_likelihood}
    if isinstance(fit, LognormalFit):
        rec["model"] = "trunc-lognormal" if fit.truncation_min is not None else "lognormal"
        rec["n"] = fit.n
        rec["excess_kurtosis"] = distfit.lognormal_kurtosis(fit)
    elif isinstance(fit, ParetoFit):
        rec["model"] = "pareto1"
        rec["n"] = fit.n_tail
        rec["n_total"] = fit.n_total
    elif isinstance(fit, GpdFit):
        rec["n"] = fit.n_exceed
        rec["implied_alpha"] = fit.implied_alpha
    rec["plug_in_mean"] = tail_risk.plug_in_mean(fit).value
    if sample is not None:
        x = dataset.as_array(sample)
        tail = x[x > fit.threshold] if isinstance(fit, GpdFit) else x[x >= fit.support_min]
        rec["ks_distance"] = distfit.ks_distance(tail, fit)
    return rec


def xmin_record(res: distfit.XminResult) -> dict:
    return {
        "xmin": res.xmin,
        "alpha": res.alpha,
        "ks_distance": res.ks_distance,
        "n_tail": res.n_tail,
        "scan": [{"xmin": a, "alpha": b, "ks_distance": c} for a, b, c in res.scan],
    }


def vuong_record(v: model_select.VuongResult) -> dict:
    rec = jsonable(v)
    rec["favored"] = v.favored
    return rec


def _degraded(fn: Callable[[], Any], status: str = INSUFFICIENT_TAIL):
    """Run ``fn``; on a too-small or degenerate input return a status marker instead."""
    try:
        return fn()
    except (EmptyTailError, DegenerateSampleError, DataError) as exc:
        return {"status": status, "reason": str(exc)}


# -- plot data -----------------------------------------------------------------


def ccdf_rows(sample, pareto: ParetoFit | None, lognormal: LognormalFit | None):
    """``(x, p_empirical, p_pareto, p_lognormal)``; the Pareto column is blank below xmin."""
    rows = []
    for x, p in stats_core.empirical_ccdf(sample):
        p_par = None
        if pareto is not None and x >= pareto.xmin:
            p_par = distfit.spliced_tail_probability(pareto, x)
        p_ln = float(lognormal.sf(x)) if lognormal is not None else None
        rows.append((x, p, p_par, p_ln))
    return rows


CCDF_HEADER = ("x", "p_empirical", "p_pareto", "p_lognormal")
TIME_HEADER = ("year", "season", "value")


def time_rows(table: dataset.GamesTable, figure: str):
    if figure == "cost-time":
        return [(y, s, c) for y, s, c in dataset.costs(table)]
    if figure == "athlete-time":
        return [(u.year, u.season, u.cost_per_athlete) for u in dataset.derive_unit_costs(table)]
    raise DataError(f"unknown figure {figure!r}")


def drop_outlier(rows):
    """Rows without the single largest value."""
    if not rows:
        return rows
    top = max(range(len(rows)), key=lambda i: rows[i][2])
    return rows[:top] + rows[top + 1:]


def plot_tables(table: dataset.GamesTable | None, sample, xmin="auto") -> dict[str, str]:
    """File name to CSV text for every figure the input supports."""
    ratios = dataset.as_array(sample)
    pareto = _tail_fit(ratios, xmin)
    lognormal = None
    try:
        lognormal = distfit.fit_lognormal(ratios)
    except FatcostError:
        pass
    out = {"ccdf.csv": csv_text(CCDF_HEADER, ccdf_rows(ratios, pareto if isinstance(pareto, ParetoFit) else None,
                                                      lognormal))}
    if table is not None:
        out["cost-time.csv"] = csv_text(TIME_HEADER, time_rows(table, "cost-time"))
        athletes = time_rows(table, "athlete-time")
        out["athlete-time.csv"] = csv_text(TIME_HEADER, athletes)
        out["athlete-time-without-outlier.csv"] = csv_text(TIME_HEADER, drop_outlier(athletes))
    return out


def _tail_fit(x, xmin):
    """Pareto fit for ``xmin`` in {"auto", "min", number}; ``None`` when the tail is too small."""
    try:
        if xmin == "auto":
            return distfit.select_xmin(x).fit
        if xmin == "min":
            return distfit.fit_pareto_hill(x, float(np.min(x)))
        return distfit.fit_pareto_hill(x, float(xmin))
    except (EmptyTailError, DegenerateSampleError, DataError):
        return None


# -- risk ----------------------------------------------------------------------


def risk_analysis(sample, acceptable_risk=0.2, bound_l=1.0, bound_h=10.0, xmin=FIXED_TAIL_XMIN) -> dict:
    """Mean estimates, heuristics and uplifts for an overrun sample."""
    x = dataset.as_array(sample)
    fits: dict[str, Any] = {}
    notes = []
    fits["lognormal"] = distfit.fit_lognormal(x)
    for name, build in (
        ("pareto1_min", lambda: distfit.fit_pareto_hill(x, float(x.min()))),
        ("pareto1_tail", lambda: distfit.fit_pareto_hill(x, xmin)),
        ("trunc-lognormal_tail", lambda: distfit.fit_truncated_lognormal(x, xmin)),
    ):
        try:
            fits[name] = build()
        except (EmptyTailError, DegenerateSampleError, DataError) as exc:
            notes.append(f"{name}: {INSUFFICIENT_TAIL} ({exc})")

    means = [tail_risk.sample_mean(x)] + [tail_risk.plug_in_mean(f) for f in fits.values()]
    if "pareto1_tail" in fits:
        means.append(tail_risk.spliced_mean(x, fits["pareto1_tail"]))
    try:
        means.append(tail_risk.shadow_mean_dual(x, bound_l, bound_h))
    except (DataError, EmptyTailError, DegenerateSampleError) as exc:
        notes.append(f"shadow_dual: {exc}")

    heur = tail_risk.evaluate_heuristics(x, fits, means)
    risks = sorted(set(UPLIFT_RISKS) | {float(acceptable_risk)}, reverse=True)
    uplifts = [tail_risk.rcf_uplift(x, r, fits["lognormal"]) for r in risks]
    alphas = {k: f.alpha for k, f in fits.items() if isinstance(f, ParetoFit)}
    return {
        "fits": {k: fit_record(f, x) for k, f in fits.items()},
        "means": [dict(jsonable(m), overrun_pct=m.overrun_pct) for m in means],
        "heuristics": {
            "p_threefold_empirical": heur.p_threefold_empirical,
            "p_threefold_by_model": dict(heur.p_threefold_by_model),
            "true_mean_range_pct": list(heur.true_mean_range_pct),
            "verdicts": heur.verdicts,
        },
        "uplifts": [jsonable(u) for u in uplifts],
        "selected_uplift": jsonable(tail_risk.rcf_uplift(x, acceptable_risk, fits["lognormal"])),
        "randomness": {k: _randomness_record(a) for k, a in alphas.items()},
        "notes": notes,
    }


def _randomness_record(alpha):
    rc = tail_risk.classify_randomness(alpha)
    return {
        "alpha": rc.alpha,
        "regime": rc.regime,
        "peers": [{"event_type": p.event_type, "alpha_low": p.alpha_low, "alpha_high": p.alpha_high} for p in rc.peers],
    }


# -- full report ----------------------------------------------------------------


def _cohorts(table):
    out = {}
    for f in ("all", "summer", "winter"):
        out[f] = _degraded(
            lambda f=f: summary_record(
                stats_core.summary(dataset.overrun_ratios(table, f), OVERRUN_THRESHOLDS), ratios=True
            ),
            "no data",
        )
    return out


def _cost_cohorts(table):
    out = {}
    for f in ("all", "summer", "winter"):
        values = [c for _, _, c in dataset.costs(table, f)]
        out[f] = summary_record(stats_core.summary(values), ratios=False) if values else {"status": "no data"}
    return out


def _trends(table):
    return {
        f: _degraded(lambda f=f: jsonable(stats_core.log_trend((y, c) for y, _, c in dataset.costs(table, f))),
                     "no data")
        for f in ("all", "summer", "winter")
    }


def _tests(table, x):
    out = {"wilcoxon_signed_rank": _degraded(lambda: jsonable(stats_core.wilcoxon_signed_rank(x)), "unavailable")}
    if table is not None:
        def summer_vs_winter():
            return jsonable(stats_core.rank_sum(dataset.overrun_ratios(table, "summer"),
                                                dataset.overrun_ratios(table, "winter")))
        out["rank_sum_summer_vs_winter"] = _degraded(summer_vs_winter, "unavailable")
    return out


def _simulations(seed, alpha):
    runs = 400
    dist = tail_sim.SimDistribution.pareto(alpha, 1.0)
    heavy = tail_sim.SimDistribution.pareto(1.2, 1.0)
    trace = tail_sim.running_mean_experiment(dist, horizon=1000, runs=200, seed=seed)
    d_heavy = tail_sim.mean_dispersion(heavy, 19, runs, seed)
    d_gauss = tail_sim.mean_dispersion(tail_sim.matched_gaussian(heavy), 19, runs, seed)
    return {
        "seed": seed,
        "running_mean": trace.summary(),
        "record_exceedance_19_19": tail_sim.record_exceedance(dist, 19, 19, runs, seed),
        "record_exceedance_19_76": tail_sim.record_exceedance(dist, 19, 76, runs, seed),
        "dispersion_pareto_1_2": d_heavy,
        "dispersion_matched_gaussian": d_gauss,
        "dispersion_ratio": d_heavy / d_gauss if d_gauss > 0 else math.inf,
    }


def build_report(table: dataset.GamesTable | None, sample, seed: int = 0, xmin=FIXED_TAIL_XMIN) -> dict:
    """Every analysis on one input, in one JSON-ready mapping.

    Sections that need a tail the input cannot supply carry
    ``{"status": "insufficient tail", "reason": ...}`` instead of numbers.
    """
    x = dataset.as_array(sample)
    rep: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "seed": int(seed), "xmin_fixed": float(xmin)}
    rep["input"] = {"source": table.provenance if table is not None else "sample", "n_ratios": int(x.size)}
    if table is not None:
        rep["summary"] = {"overrun": _cohorts(table), "cost": _cost_cohorts(table)}
        units = dataset.derive_unit_costs(table)
        rep["unit_costs"] = {"rows": jsonable(units.rows), "skipped": jsonable(units.skipped)}
        rep["trends"] = _trends(table)
    else:
        rep["summary"] = {"overrun": {"all": summary_record(stats_core.summary(x, OVERRUN_THRESHOLDS), ratios=True)}}
    rep["tests"] = _tests(table, x)

    fits = {
        "lognormal": _degraded(lambda: fit_record(distfit.fit_lognormal(x), x)),
        "pareto1_min": _degraded(lambda: fit_record(distfit.fit_pareto_hill(x, float(x.min())), x)),
        "pareto1_fixed": _degraded(lambda: fit_record(distfit.fit_pareto_hill(x, xmin), x)),
        "trunc-lognormal_fixed": _degraded(lambda: fit_record(distfit.fit_truncated_lognormal(x, xmin), x)),
        "gpd": _degraded(lambda: fit_record(distfit.fit_gpd(x, 1.0), x)),
    }
    for name, rec in fits.items():
        if name != "lognormal" and "n" in rec and rec["n"] < 5:
            fits[name] = {"status": INSUFFICIENT_TAIL, "reason": f"only {rec['n']} tail value(s)", **rec}
    rep["fits"] = fits
    auto = _degraded(lambda: distfit.select_xmin(x))
    rep["xmin"] = xmin_record(auto) if isinstance(auto, distfit.XminResult) else auto

    def compare(at):
        return vuong_record(model_select.vuong_test(
            x, distfit.fit_truncated_lognormal(x, at), distfit.fit_pareto_hill(x, at), at))

    rep["vuong"] = {"fixed": _degraded(lambda: compare(xmin))}
    if isinstance(auto, distfit.XminResult):
        rep["vuong"]["auto"] = _degraded(lambda: compare(auto.xmin))

    rep["risk"] = _degraded(lambda: risk_analysis(x, xmin=xmin), "unavailable")
    alpha = auto.alpha if isinstance(auto, distfit.XminResult) else 1.2
    rep["simulation"] = _simulations(int(seed), alpha)
    return rep
