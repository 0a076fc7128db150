"""Maximum-likelihood fits of fat-tailed models and tail-cutoff selection.

Four models are supported:

* lognormal, optionally fitted to data truncated below at ``truncation_min``;
* Pareto I above a cutoff ``xmin`` (closed-form Hill estimator);
* generalized Pareto over exceedances of a threshold.

Every fitted model exposes the same small surface (``logpdf``, ``sf``,
``logsf``, ``isf``, ``support_min``) so that KS distances, tail
probabilities and likelihood-ratio tests can treat them uniformly.

Survival functions are *parent-law* survival functions.  For Pareto and GPD
the parent law already lives above the cutoff, so ``sf`` is the tail law
conditional on exceeding it.  For a truncated lognormal ``sf`` is the
untruncated lognormal with the fitted parameters; use
:func:`conditional_sf` for the law of ``X | X >= truncation_min``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np
from scipy import optimize, special

from .dataset import as_array
from .errors import ConvergenceError, DataError, DegenerateSampleError, EmptyTailError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Nelder-Mead settings shared by every numerical fit.
NM_XTOL = 1e-9
NM_MAX_EVALS = 10_000
NM_RESTARTS = 3
# deterministic restart offsets, in units of the per-parameter scale
_JITTER = ((0.0, 0.0, 0.0), (0.1, -0.1, 0.1), (-0.1, 0.1, -0.1))


def _norm_logsf(z):
    return special.log_ndtr(-np.asarray(z, dtype=float))


@dataclass(frozen=True)
class LognormalFit:
    mu: float
    sigma: float
    truncation_min: float | None = None
    n: int = 0
    log_likelihood: float = math.nan
    kind = "lognormal"

    def __post_init__(self):
        if not self.sigma > 0:
            raise DegenerateSampleError(f"lognormal sigma must be positive, got {self.sigma}")
        if self.truncation_min is not None and not self.truncation_min > 0:
            raise DataError("truncation_min must be positive")

    @property
    def support_min(self) -> float:
        return self.truncation_min if self.truncation_min is not None else 0.0

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(x)
            z = (lx - self.mu) / self.sigma
            out = -0.5 * z * z - _LOG_SQRT_2PI - math.log(self.sigma) - lx
        return np.where(x > 0, out, -np.inf)

    def logsf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            z = (np.log(np.where(x > 0, x, 1.0)) - self.mu) / self.sigma
        return np.where(x > 0, _norm_logsf(z), 0.0)

    def sf(self, x):
        return np.exp(self.logsf(x))

    def isf(self, p):
        return np.exp(self.mu + self.sigma * special.ndtri(1.0 - np.asarray(p, dtype=float)))

    def params(self) -> dict:
        return {"mu": self.mu, "sigma": self.sigma, "truncation_min": self.truncation_min}


@dataclass(frozen=True)
class ParetoFit:
    xmin: float
    alpha: float
    n_tail: int = 0
    log_likelihood: float = math.nan
    n_total: int = 0  # size of the sample the tail was cut from
    kind = "pareto"

    def __post_init__(self):
        if not (self.alpha > 0 and self.xmin > 0):
            raise DataError(f"Pareto needs alpha > 0 and xmin > 0, got {self.alpha}, {self.xmin}")

    @property
    def support_min(self) -> float:
        return self.xmin

    @property
    def tail_weight(self) -> float:
        """Empirical share of the sample at or above ``xmin``."""
        if self.n_total <= 0:
            return math.nan
        return self.n_tail / self.n_total

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = math.log(self.alpha) + self.alpha * math.log(self.xmin) - (self.alpha + 1.0) * np.log(x)
        return np.where(x >= self.xmin, out, -np.inf)

    def logsf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.alpha * (math.log(self.xmin) - np.log(x))
        return np.where(x >= self.xmin, out, 0.0)

    def sf(self, x):
        return np.exp(self.logsf(x))

    def isf(self, p):
        return self.xmin * np.asarray(p, dtype=float) ** (-1.0 / self.alpha)

    def params(self) -> dict:
        return {"xmin": self.xmin, "alpha": self.alpha}


@dataclass(frozen=True)
class GpdFit:
    threshold: float
    scale: float
    shape: float
    n_exceed: int = 0
    log_likelihood: float = math.nan
    kind = "gpd"

    def __post_init__(self):
        if not self.scale > 0:
            raise DataError(f"GPD scale must be positive, got {self.scale}")

    @property
    def implied_alpha(self) -> float:
        """Tail exponent ``1 / shape``; infinite for bounded or exponential tails."""
        return 1.0 / self.shape if self.shape > 0 else math.inf

    @property
    def support_min(self) -> float:
        return self.threshold

    @property
    def support_max(self) -> float:
        return self.threshold - self.scale / self.shape if self.shape < 0 else math.inf

    def _excess(self, x):
        return np.asarray(x, dtype=float) - self.threshold

    def logsf(self, x):
        y = np.maximum(self._excess(x), 0.0)
        xi, s = self.shape, self.scale
        if abs(xi) < 1e-12:
            return -y / s
        arg = 1.0 + xi * y / s
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -np.log(np.where(arg > 0, arg, 1.0)) / xi
        return np.where(arg > 0, out, -np.inf)

    def sf(self, x):
        return np.exp(self.logsf(x))

    def logpdf(self, x):
        y = self._excess(x)
        xi, s = self.shape, self.scale
        if abs(xi) < 1e-12:
            out = -math.log(s) - y / s
            return np.where(y >= 0, out, -np.inf)
        arg = 1.0 + xi * y / s
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -math.log(s) - (1.0 / xi + 1.0) * np.log(np.where(arg > 0, arg, 1.0))
        return np.where((y >= 0) & (arg > 0), out, -np.inf)

    def isf(self, p):
        p = np.asarray(p, dtype=float)
        xi, s = self.shape, self.scale
        if abs(xi) < 1e-12:
            return self.threshold - s * np.log(p)
        return self.threshold + s / xi * (p ** (-xi) - 1.0)

    def params(self) -> dict:
        return {"threshold": self.threshold, "scale": self.scale, "shape": self.shape}


Fit = Union[LognormalFit, ParetoFit, GpdFit]


@dataclass(frozen=True)
class XminResult:
    xmin: float
    alpha: float
    ks_distance: float
    n_tail: int
    fit: ParetoFit
    scan: tuple[tuple[float, float, float], ...] = field(repr=False)  # (xmin, alpha, ks)


# -- optimizer ---------------------------------------------------------------


@dataclass(frozen=True)
class OptimumResult:
    x: np.ndarray
    fun: float
    evaluations: int
    restarts: int
    diameter: float


def _simplex_diameter(simplex):
    sim = np.asarray(simplex)
    return float(max(np.max(np.abs(a - b)) for a in sim for b in sim))


def nelder_mead(
    fun: Callable[[np.ndarray], float],
    x0: Sequence[float],
    *,
    scales: Sequence[float] | None = None,
    restarts: int = NM_RESTARTS,
    xtol: float = NM_XTOL,
    max_evals: int = NM_MAX_EVALS,
) -> OptimumResult:
    """Minimize ``fun`` by Nelder-Mead from ``restarts`` deterministic starts.

    Each start stops when the simplex spans less than ``xtol`` in every
    coordinate or after ``max_evals`` evaluations.  The lowest objective
    wins; if that run hit the budget a :class:`ConvergenceError` carrying
    the best point is raised.
    """
    x0 = np.asarray(x0, dtype=float)
    scales = np.ones_like(x0) if scales is None else np.asarray(scales, dtype=float)
    best, total_evals = None, 0
    for k in range(restarts):
        offset = np.array([_JITTER[k % len(_JITTER)][i % 3] for i in range(x0.size)])
        start = x0 + offset * scales * (1 + k // len(_JITTER))
        res = optimize.minimize(
            fun,
            start,
            method="Nelder-Mead",
            options={"xatol": xtol, "fatol": np.inf, "maxfev": max_evals, "maxiter": max_evals,
                     "return_all": False, "adaptive": False},
        )
        total_evals += int(res.nfev)
        simplex = res.final_simplex[0]
        candidate = (float(res.fun), bool(res.success), res.x, _simplex_diameter(simplex))
        if best is None or candidate[0] < best[0]:
            best = candidate
    fval, success, x, diameter = best
    if not (success and math.isfinite(fval)):
        raise ConvergenceError(
            "Nelder-Mead did not converge within budget",
            best=np.asarray(x),
            diagnostics={"fun": fval, "evaluations": total_evals, "diameter": diameter, "restarts": restarts},
        )
    return OptimumResult(np.asarray(x), fval, total_evals, restarts, diameter)


# -- fitting -----------------------------------------------------------------


def _values(sample):
    x = as_array(sample)
    if np.any(~np.isfinite(x)):
        raise DataError("sample contains non-finite values")
    return x


def _lognormal_loglik(x, mu, sigma):
    return float(np.sum(LognormalFit(mu, sigma).logpdf(x)))


def fit_lognormal(sample: Iterable[float]) -> LognormalFit:
    """Closed-form lognormal MLE: mean and divisor-n sd of ``ln x``."""
    x = _values(sample)
    if x.size < 2:
        raise DataError("lognormal fit needs at least 2 values")
    if np.any(x <= 0):
        raise DataError("lognormal fit needs positive values")
    lx = np.log(x)
    mu = float(lx.mean())
    sigma = float(np.sqrt(np.mean((lx - mu) ** 2)))
    if not sigma > 0:
        raise DegenerateSampleError("all values equal; lognormal sigma would be zero")
    return LognormalFit(mu, sigma, None, int(x.size), _lognormal_loglik(x, mu, sigma))


def lognormal_kurtosis(fit: LognormalFit | float) -> float:
    """Excess kurtosis ``e^{4s^2} + 2e^{3s^2} + 3e^{2s^2} - 6`` of a lognormal."""
    sigma = fit.sigma if isinstance(fit, LognormalFit) else float(fit)
    s2 = sigma * sigma
    if 4 * s2 > 709.0:
        return math.inf
    return math.exp(4 * s2) + 2 * math.exp(3 * s2) + 3 * math.exp(2 * s2) - 6.0


def tail_of(sample, xmin: float) -> np.ndarray:
    x = _values(sample)
    return np.sort(x[x >= xmin])


def fit_pareto_hill(sample: Iterable[float], xmin: float) -> ParetoFit:
    """Continuous Pareto MLE above ``xmin``: ``alpha = n / sum(ln(x / xmin))``."""
    if not xmin > 0:
        raise DataError("xmin must be positive")
    x = _values(sample)
    tail = np.sort(x[x >= xmin])
    n = tail.size
    if n < 2:
        raise EmptyTailError(f"only {n} value(s) at or above xmin={xmin:g}; need at least 2")
    log_excess = float(np.sum(np.log(tail / xmin)))
    if not log_excess > 0:
        raise DegenerateSampleError("every tail value equals xmin; alpha is unbounded")
    alpha = n / log_excess
    loglik = n * math.log(alpha) + n * alpha * math.log(xmin) - (alpha + 1.0) * float(np.sum(np.log(tail)))
    return ParetoFit(float(xmin), alpha, n, loglik, int(x.size))


def fit_truncated_lognormal(sample: Iterable[float], xmin: float) -> LognormalFit:
    """Lognormal MLE for the values at or above ``xmin``, accounting for truncation.

    Maximizes ``sum(ln f(x_i) - ln(1 - F(xmin)))`` over (mu, ln sigma) by
    Nelder-Mead, starting from the untruncated fit of the tail values.
    """
    if not xmin > 0:
        raise DataError("xmin must be positive")
    tail = tail_of(sample, xmin)
    if tail.size < 5:
        raise EmptyTailError(f"only {tail.size} value(s) at or above xmin={xmin:g}; need at least 5")
    lx = np.log(tail)
    sd = float(np.sqrt(np.mean((lx - lx.mean()) ** 2)))
    if not sd > 0:
        raise DegenerateSampleError("all tail values equal")
    lxmin = math.log(xmin)
    n = tail.size
    sum_lx = float(lx.sum())

    def nll(p):
        mu, s = p
        sigma = math.exp(s)
        z = (lx - mu) / sigma
        ll = -0.5 * float(z @ z) - n * (_LOG_SQRT_2PI + s) - sum_lx
        ll -= n * float(_norm_logsf((lxmin - mu) / sigma))
        return -ll if math.isfinite(ll) else math.inf

    opt = nelder_mead(nll, [float(lx.mean()), math.log(sd)], scales=[sd, 0.5])
    mu, sigma = float(opt.x[0]), math.exp(float(opt.x[1]))
    return LognormalFit(mu, sigma, float(xmin), int(n), -opt.fun)


def fit_gpd(sample: Iterable[float], threshold: float = 1.0) -> GpdFit:
    """Generalized Pareto MLE over exceedances ``x - threshold`` of values above it.

    Optimizes (ln scale, shape) by Nelder-Mead from a method-of-moments
    start; shapes at or below -1 are excluded because the likelihood is
    unbounded there.
    """
    x = _values(sample)
    y = np.sort(x[x > threshold] - threshold)
    n = y.size
    if n < 5:
        raise EmptyTailError(f"only {n} exceedance(s) above threshold={threshold:g}; need at least 5")
    m, v = float(y.mean()), float(y.var(ddof=1))
    if not v > 0:
        raise DegenerateSampleError("all exceedances equal; GPD likelihood unbounded")
    xi0 = float(np.clip(0.5 * (1.0 - m * m / v), -0.45, 0.9))
    sigma0 = max(m * (1.0 - xi0), 1e-8)

    def nll(p):
        s, xi = p
        if xi <= -1.0:
            return math.inf
        ll = float(np.sum(GpdFit(0.0, math.exp(s), xi).logpdf(y)))
        return -ll if math.isfinite(ll) else math.inf

    opt = nelder_mead(nll, [math.log(sigma0), xi0], scales=[0.5, 0.2])
    scale, shape = math.exp(float(opt.x[0])), float(opt.x[1])
    return GpdFit(float(threshold), scale, shape, int(n), -opt.fun)


# -- goodness of fit and model evaluation -----------------------------------


def conditional_sf(model: Fit, x) -> np.ndarray:
    """``P(X >= x | X >= support_min)``; equals ``sf`` for Pareto and GPD."""
    return np.exp(model.logsf(x) - model.logsf(model.support_min))


def conditional_logpdf(model: Fit, x, xmin: float) -> np.ndarray:
    """Log density of the model's law conditioned on ``X >= xmin``."""
    return model.logpdf(x) - model.logsf(xmin)


def _check_support(model, x):
    lo = model.support_min
    bad = x < lo if lo > 0 else x <= 0
    hi = getattr(model, "support_max", math.inf)
    bad = bad | (x > hi)
    if np.any(bad):
        raise DataError(f"value(s) outside the {model.kind} support: {x[bad][:5].tolist()}")


def ks_distance(tail: Iterable[float], model: Fit) -> float:
    """Kolmogorov-Smirnov distance between the tail's ECDF and the model CDF.

    The model CDF is conditional on the model's lower support bound.  The
    supremum covers both sides of every ECDF step (``i/n`` and
    ``(i-1)/n``).
    """
    x = np.sort(_values(tail))
    if x.size == 0:
        raise EmptyTailError("KS distance needs a non-empty tail")
    _check_support(model, x)
    n = x.size
    cdf = 1.0 - conditional_sf(model, x)
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(min(1.0, max(np.max(np.abs(upper)), np.max(np.abs(lower)))))


def select_xmin(sample: Iterable[float], min_tail: int = 5) -> XminResult:
    """Choose the Pareto cutoff minimizing the KS distance of the Hill fit.

    Candidates are the distinct observed values that leave at least
    ``min_tail`` points in the tail.  Ties go to the smaller cutoff.
    """
    x = np.sort(_values(sample))
    if x.size < min_tail + 1:
        raise DataError(f"xmin scan needs at least {min_tail + 1} values, got {x.size}")
    scan, best = [], None
    for candidate in np.unique(x):
        tail = x[x >= candidate]
        if tail.size < min_tail:
            break
        try:
            fit = fit_pareto_hill(x, float(candidate))
        except DegenerateSampleError:
            continue
        d = ks_distance(tail, fit)
        scan.append((float(candidate), fit.alpha, d))
        if best is None or d < best[1]:
            best = (fit, d)
    if best is None:
        raise DegenerateSampleError("no admissible xmin candidate")
    fit, d = best
    return XminResult(fit.xmin, fit.alpha, d, fit.n_tail, fit, tuple(scan))


def tail_probability(model: Fit, x: float) -> float:
    """``P(X >= x)`` under the model's parent law (conditional tail for Pareto/GPD)."""
    return float(model.sf(x))


def spliced_tail_probability(fit: ParetoFit, x: float) -> float:
    """Unconditional ``P(X >= x)`` for ``x >= xmin``: tail law times the tail weight."""
    if x < fit.xmin:
        raise DataError("spliced tail probability is only defined at or above xmin")
    if fit.n_total <= 0:
        raise DataError("Pareto fit carries no sample size; cannot weight the tail")
    return float(fit.sf(x)) * fit.tail_weight


def model_ccdf(model: Fit, xs: Iterable[float]) -> list[tuple[float, float]]:
    xs = _values(xs)
    return [(float(v), float(p)) for v, p in zip(xs, model.sf(xs))]
