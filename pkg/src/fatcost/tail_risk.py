"""Mean estimation under fat tails, randomness regimes and hosting heuristics.

Pareto means come in two flavours.  ``pareto_conditional`` is the mean of
the tail law above ``xmin`` (``alpha * xmin / (alpha - 1)``);
``pareto_spliced`` mixes the empirical mean below ``xmin`` with that tail
mean, weighted by the empirical share on each side.  Any Pareto mean with
``alpha <= 1`` is reported as ``math.inf``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate, special

from .dataset import as_array
from .distfit import Fit, GpdFit, LognormalFit, ParetoFit, fit_pareto_hill, tail_probability
from .errors import DataError, EmptySampleError

THREEFOLD = 3.0
QUAD_EPSREL = 1e-8

REGIMES = ("infinite_mean", "levy_stable", "finite_variance", "higher_moments")


@dataclass(frozen=True)
class MeanEstimate:
    method: str
    value: float
    inputs: dict = field(default_factory=dict)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def overrun_pct(self) -> float:
        return (self.value - 1.0) * 100.0


@dataclass(frozen=True)
class ReferenceEvent:
    event_type: str
    measure: str
    source: str
    alpha_low: float
    alpha_high: float


@dataclass(frozen=True)
class RandomnessClass:
    alpha: float
    regime: str
    peers: tuple[ReferenceEvent, ...] = ()

    @property
    def mean_is_finite(self) -> bool:
        return self.regime != "infinite_mean"

    @property
    def variance_is_finite(self) -> bool:
        return self.regime in ("finite_variance", "higher_moments")


@dataclass(frozen=True)
class HeuristicReport:
    p_threefold_empirical: float
    p_threefold_by_model: tuple[tuple[str, float], ...]
    true_mean_range_pct: tuple[float, float]
    means: tuple[MeanEstimate, ...]
    verdicts: dict


@dataclass(frozen=True)
class UpliftResult:
    acceptable_risk: float
    empirical_uplift_pct: float
    model_uplift_pct: float | None = None
    method: str = "nearest-rank"


# -- means -------------------------------------------------------------------


def _pareto_tail_mean(alpha, xmin):
    return alpha * xmin / (alpha - 1.0) if alpha > 1.0 else math.inf


def lognormal_conditional_mean(fit: LognormalFit, lower: float) -> float:
    """``E[X | X >= lower]`` under the lognormal law of ``fit``."""
    z = (math.log(lower) - fit.mu) / fit.sigma
    log_ratio = special.log_ndtr(fit.sigma - z) - special.log_ndtr(-z)
    return math.exp(fit.mu + 0.5 * fit.sigma**2 + log_ratio)


def plug_in_mean(fit: Fit) -> MeanEstimate:
    """Mean implied by the fitted law.

    Lognormal: ``exp(mu + sigma^2 / 2)``, or the mean above the truncation
    point for a truncated fit.  Pareto: the conditional tail mean.  GPD:
    ``threshold + scale / (1 - shape)`` for shape below one.
    """
    if isinstance(fit, LognormalFit):
        if fit.truncation_min is None:
            value = math.exp(fit.mu + 0.5 * fit.sigma**2)
        else:
            value = lognormal_conditional_mean(fit, fit.truncation_min)
        return MeanEstimate("lognormal_plug_in", value, fit.params())
    if isinstance(fit, ParetoFit):
        return MeanEstimate("pareto_conditional", _pareto_tail_mean(fit.alpha, fit.xmin), fit.params())
    if isinstance(fit, GpdFit):
        value = fit.threshold + fit.scale / (1.0 - fit.shape) if fit.shape < 1 else math.inf
        return MeanEstimate("gpd_conditional", value, fit.params())
    raise TypeError(f"unsupported fit {type(fit).__name__}")


def spliced_mean(sample: Iterable[float], tail_fit: ParetoFit) -> MeanEstimate:
    """Empirical body below ``xmin`` spliced to the Pareto tail mean above it."""
    x = as_array(sample)
    if x.size == 0:
        raise EmptySampleError("spliced mean needs a sample")
    if tail_fit.xmin > x.max():
        raise DataError("tail cutoff lies above the sample maximum")
    inputs = {**tail_fit.params(), "n": int(x.size)}
    tail_mean = _pareto_tail_mean(tail_fit.alpha, tail_fit.xmin)
    if math.isinf(tail_mean):
        return MeanEstimate("pareto_spliced", math.inf, inputs)
    body = x[x < tail_fit.xmin]
    w_body = body.size / x.size
    value = (float(body.mean()) * w_body if body.size else 0.0) + tail_mean * (1.0 - w_body)
    return MeanEstimate("pareto_spliced", value, {**inputs, "body_weight": w_body})


def dual_transform(x, lower_bound: float, upper_bound: float):
    """Map values bounded in ``[L, H)`` to an unbounded ``[L, inf)`` scale."""
    L, H = lower_bound, upper_bound
    return L - H * np.log((H - np.asarray(x, dtype=float)) / (H - L))


def inverse_dual_transform(z, lower_bound: float, upper_bound: float):
    L, H = lower_bound, upper_bound
    return L + (H - L) * (1.0 - np.exp(-(np.asarray(z, dtype=float) - L) / H))


def dual_mean(alpha: float, lower_bound: float, upper_bound: float) -> float:
    """Mean of ``inverse_dual_transform(Z)`` for ``Z ~ Pareto(L, alpha)``, by quadrature.

    With ``z = L e^t`` the integral becomes
    ``int_0^inf phi^-1(L e^t) alpha e^{-alpha t} dt``.
    """
    L, H = lower_bound, upper_bound

    def integrand(t):
        # past t ~ 700 the back-transform has long saturated at H
        z = L * math.exp(min(t, 700.0))
        return float(inverse_dual_transform(z, L, H)) * alpha * math.exp(-alpha * t)

    value, _ = integrate.quad(integrand, 0.0, math.inf, epsrel=QUAD_EPSREL, epsabs=0.0, limit=200)
    return value


def shadow_mean_dual(sample: Iterable[float], lower_bound: float, upper_bound: float) -> MeanEstimate:
    """Shadow mean of a sample known to lie in ``(L, H)``.

    The sample is pushed through the log dual transform, a Pareto tail with
    cutoff ``L`` is fitted to the transformed values, and the mean of that
    law is mapped back to the bounded scale by quadrature.
    """
    x = as_array(sample)
    L, H = float(lower_bound), float(upper_bound)
    if x.size < 2:
        raise EmptySampleError("shadow mean needs at least 2 values")
    if not L > 0:
        raise DataError("lower bound must be positive")
    if not L < x.min():
        raise DataError(f"lower bound {L:g} must lie below the sample minimum {x.min():g}")
    if not H > x.max():
        raise DataError(f"upper bound {H:g} must exceed the sample maximum {x.max():g}")
    z = dual_transform(x, L, H)
    fit = fit_pareto_hill(z, L)
    value = dual_mean(fit.alpha, L, H)
    return MeanEstimate("shadow_dual", value, {"lower_bound": L, "upper_bound": H, "alpha_dual": fit.alpha})


def sample_mean(sample: Iterable[float]) -> MeanEstimate:
    x = as_array(sample)
    if x.size == 0:
        raise EmptySampleError("sample mean of an empty sample")
    return MeanEstimate("sample", float(x.mean()), {"n": int(x.size)})


# -- randomness regimes ------------------------------------------------------


def regime_for(alpha: float) -> str:
    if not alpha > 0:
        raise DataError(f"alpha must be positive, got {alpha}")
    if alpha <= 1:
        return "infinite_mean"
    if alpha < 2:
        return "levy_stable"
    if alpha < 3:
        return "finite_variance"
    return "higher_moments"


def load_reference_events() -> tuple[ReferenceEvent, ...]:
    """Published tail exponents of other power-law phenomena, sorted by alpha."""
    text = resources.files("fatcost.data").joinpath("powerlaw_reference.csv").read_text(encoding="utf-8")
    rows = csv.DictReader(text.splitlines())
    events = [
        ReferenceEvent(r["event_type"], r["measure"], r["source"], float(r["alpha_low"]), float(r["alpha_high"]))
        for r in rows
    ]
    return tuple(sorted(events, key=lambda e: (e.alpha_low, e.alpha_high, e.event_type)))


def classify_randomness(alpha: float) -> RandomnessClass:
    regime = regime_for(alpha)
    peers = tuple(
        e for e in load_reference_events() if regime in (regime_for(e.alpha_low), regime_for(e.alpha_high))
    )
    return RandomnessClass(float(alpha), regime, peers)


# -- heuristics and reference class forecasting ------------------------------


def nearest_rank_quantile(sample: Iterable[float], q: float) -> float:
    """Smallest observation with at least a fraction ``q`` of the sample at or below it."""
    x = np.sort(as_array(sample))
    if x.size == 0:
        raise EmptySampleError("quantile of an empty sample")
    rank = math.ceil(q * x.size - 1e-9)
    return float(x[min(max(rank, 1), x.size) - 1])


def _named_fits(fits):
    if isinstance(fits, Mapping):
        return list(fits.items())
    return [(f.kind, f) for f in fits]


def evaluate_heuristics(
    sample: Iterable[float],
    fits: Mapping[str, Fit] | Sequence[Fit],
    means: Sequence[MeanEstimate] | None = None,
) -> HeuristicReport:
    """Three-fold cost risk and the plausible range of the true mean overrun.

    ``means`` defaults to the sample mean plus the plug-in mean of every fit.
    """
    x = as_array(sample)
    if x.size == 0:
        raise EmptySampleError("heuristics need a sample")
    named = _named_fits(fits)
    if not named:
        raise DataError("heuristics need at least one fitted model")
    p_emp = float(np.count_nonzero(x >= THREEFOLD)) / x.size
    by_model = tuple((name, tail_probability(f, THREEFOLD)) for name, f in named)
    if means is None:
        means = [sample_mean(x)] + [plug_in_mean(f) for _, f in named]
    means = tuple(means)
    pct = [m.overrun_pct for m in means]
    low, high = min(pct), max(pct)
    model_probs = [p for _, p in by_model]
    verdicts = {
        "heuristic_1": (
            f"Observed risk of a three-fold cost increase is {100 * p_emp:.0f}% "
            f"(models: {100 * min(model_probs):.0f}-{100 * max(model_probs):.0f}%). "
            "Host only if a loss of that size at that odds is affordable."
        ),
        "heuristic_2": (
            f"Expected overrun lies between {low:.0f}% and "
            + ("an unbounded value" if math.isinf(high) else f"{high:.0f}%")
            + " in real terms, with substantial risk beyond. Host only if that is affordable, "
            "otherwise walk away or cut the tail."
        ),
    }
    return HeuristicReport(p_emp, by_model, (low, high), means, verdicts)


def rcf_uplift(sample: Iterable[float], acceptable_risk: float, model: Fit | None = None) -> UpliftResult:
    """Budget uplift (percent) that keeps the overrun risk at ``acceptable_risk``.

    The empirical uplift is read off the nearest-rank ``1 - acceptable_risk``
    quantile of the ratios.  With a model, its inverse survival function at
    ``acceptable_risk`` gives a second figure.
    """
    if not 0 < acceptable_risk < 1:
        raise DataError(f"acceptable risk must lie in (0, 1), got {acceptable_risk}")
    x = as_array(sample)
    if x.size < 2:
        raise EmptySampleError("uplift needs at least 2 observations")
    q = nearest_rank_quantile(x, 1.0 - acceptable_risk)
    model_pct = None
    if model is not None:
        model_pct = (float(model.isf(acceptable_risk)) - 1.0) * 100.0
    return UpliftResult(float(acceptable_risk), (q - 1.0) * 100.0, model_pct)
