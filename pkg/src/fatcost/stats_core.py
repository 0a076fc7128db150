"""Descriptive statistics and small-sample tests.

The rank tests compute exact null distributions by counting: every one of
the ``2**n`` sign assignments (signed-rank) or every ``C(n_a + n_b, n_a)``
arrangement (rank-sum) is tallied through a dynamic program over rank sums,
which visits the same configurations as brute-force enumeration without
listing them one by one.  Ranks are doubled so tied (half-integer) ranks
stay integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .dataset import OverrunSample, as_array
from .errors import DataError, DegenerateSampleError, EmptySampleError

EXACT_SIGNED_RANK_MAX_N = 25
EXACT_RANK_SUM_MAX_PRODUCT = 400


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    median: float
    sd: float  # divisor n - 1; nan when n == 1
    min: float
    max: float
    prop_above: tuple[tuple[float, float], ...] = ()

    def proportion_above(self, threshold: float) -> float:
        for t, p in self.prop_above:
            if t == threshold:
                return p
        raise KeyError(threshold)


@dataclass(frozen=True)
class TestResult:
    statistic_name: str
    statistic: float
    p_value: float
    sidedness: str = "two"
    method: str = "exact"
    n: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    __test__ = False  # keep pytest from collecting this class


@dataclass(frozen=True)
class TrendFit:
    slope: float  # per year, on ln(cost)
    intercept: float
    t_stat: float
    p_value: float
    n: int


def _positive_array(sample, what="sample"):
    x = as_array(sample)
    if x.size == 0:
        raise EmptySampleError(f"{what} is empty")
    return x


def summary(sample: OverrunSample | Iterable[float], thresholds: Sequence[float] = ()) -> SummaryStats:
    """Count, mean, median, sd and the share of values strictly above each threshold."""
    x = _positive_array(sample)
    n = x.size
    props = tuple((float(t), float(np.count_nonzero(x > t)) / n) for t in sorted(thresholds))
    return SummaryStats(
        n=n,
        mean=float(np.mean(x)),
        median=float(np.median(x)),
        sd=float(np.std(x, ddof=1)) if n > 1 else math.nan,
        min=float(np.min(x)),
        max=float(np.max(x)),
        prop_above=props,
    )


def average_ranks(values) -> np.ndarray:
    return stats.rankdata(values, method="average")


def _use_exact(method, small):
    if method == "auto":
        return small
    if method not in ("exact", "normal_approx"):
        raise DataError(f"unknown test method {method!r}")
    return method == "exact"


def _two_sided_from_counts(counts, observed_index):
    """2 * min(lower tail, upper tail), capped at 1, from an exact count table."""
    total = counts.sum()
    lower = counts[: observed_index + 1].sum() / total
    upper = counts[observed_index:].sum() / total
    return float(min(1.0, 2.0 * min(lower, upper)))


def signed_rank_null_counts(doubled_ranks: Sequence[int]) -> np.ndarray:
    """Number of sign assignments giving each doubled positive-rank sum."""
    total = int(sum(doubled_ranks))
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for r in doubled_ranks:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    return counts


def wilcoxon_signed_rank(
    ratios: OverrunSample | Iterable[float], *, center: float = 1.0, method: str = "auto"
) -> TestResult:
    """Signed-rank test of ``ratio - center`` against a symmetric null at zero.

    ``V`` is the sum of ranks of positive differences.  Zero differences are
    dropped before ranking and ties get average ranks.  Up to 25 non-zero
    differences the two-sided p-value is exact; above that a normal
    approximation with tie and continuity correction is used.  ``method``
    ("auto", "exact", "normal_approx") overrides the choice.
    """
    x = _positive_array(ratios)
    d = x - center
    d = d[d != 0]
    m = d.size
    if m == 0:
        raise DegenerateSampleError("all differences are zero; signed-rank test undefined")
    ranks = average_ranks(np.abs(d))
    v = float(ranks[d > 0].sum())
    if _use_exact(method, m <= EXACT_SIGNED_RANK_MAX_N):
        doubled = [int(round(2 * r)) for r in ranks]
        counts = signed_rank_null_counts(doubled)
        p = _two_sided_from_counts(counts, int(round(2 * v)))
        method = "exact"
    else:
        mean = m * (m + 1) / 4.0
        _, tie_counts = np.unique(np.abs(d), return_counts=True)
        var = m * (m + 1) * (2 * m + 1) / 24.0 - np.sum(tie_counts**3 - tie_counts) / 48.0
        z = (abs(v - mean) - 0.5) / math.sqrt(var) if var > 0 else 0.0
        p = float(min(1.0, 2.0 * stats.norm.sf(max(z, 0.0))))
        method = "normal_approx"
    return TestResult("V", v, p, "two", method, n=m, extra={"negative_rank_sum": float(ranks[d < 0].sum())})


def rank_sum_null_counts(doubled_ranks: Sequence[int], n_a: int) -> np.ndarray:
    """Number of size-``n_a`` subsets giving each doubled rank sum."""
    total = int(sum(doubled_ranks))
    # counts[k][s]: subsets of size k with doubled rank sum s
    counts = [np.zeros(total + 1, dtype=object) for _ in range(n_a + 1)]
    counts[0][0] = 1
    for r in doubled_ranks:
        for k in range(n_a, 0, -1):
            counts[k][r:] = counts[k][r:] + counts[k - 1][: total + 1 - r]
    return counts[n_a]


def rank_sum(sample_a: Iterable[float], sample_b: Iterable[float], *, method: str = "auto") -> TestResult:
    """Mann-Whitney / Wilcoxon rank-sum test; the statistic is U for ``sample_a``.

    Exact two-sided p-value when ``n_a * n_b <= 400``, otherwise the normal
    approximation with tie and continuity correction.
    """
    a = _positive_array(sample_a, "sample_a")
    b = _positive_array(sample_b, "sample_b")
    n_a, n_b = a.size, b.size
    ranks = average_ranks(np.concatenate([a, b]))
    u = float(ranks[:n_a].sum() - n_a * (n_a + 1) / 2.0)
    if _use_exact(method, n_a * n_b <= EXACT_RANK_SUM_MAX_PRODUCT):
        doubled = [int(round(2 * r)) for r in ranks]
        counts = rank_sum_null_counts(doubled, n_a)
        observed = int(round(2 * ranks[:n_a].sum()))
        p = _two_sided_from_counts(counts, observed)
        method = "exact"
    else:
        n = n_a + n_b
        _, tie_counts = np.unique(ranks, return_counts=True)
        tie_term = np.sum(tie_counts**3 - tie_counts) / (n * (n - 1))
        var = n_a * n_b / 12.0 * ((n + 1) - tie_term)
        z = (abs(u - n_a * n_b / 2.0) - 0.5) / math.sqrt(var) if var > 0 else 0.0
        p = float(min(1.0, 2.0 * stats.norm.sf(max(z, 0.0))))
        method = "normal_approx"
    return TestResult("W", u, p, "two", method, n=n_a + n_b, extra={"n_a": n_a, "n_b": n_b})


def log_trend(points: Iterable[tuple[float, float]]) -> TrendFit:
    """OLS of ln(cost) on year with a two-sided t-test on the slope (n - 2 df).

    A log-linear form is used because costs are positive and grow
    multiplicatively; rescaling every cost by a constant shifts only the
    intercept.
    """
    pts = [(float(year), float(cost)) for year, cost in points]
    if len(pts) < 3:
        raise DataError(f"trend fit needs at least 3 points, got {len(pts)}")
    years = np.array([p[0] for p in pts])
    cost = np.array([p[1] for p in pts])
    if np.any(cost <= 0):
        raise DataError("trend fit needs positive costs")
    y = np.log(cost)
    n = years.size
    xc = years - years.mean()
    sxx = float(xc @ xc)
    if sxx == 0:
        raise DataError("trend fit needs at least two distinct years")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * years.mean())
    resid = y - (intercept + slope * years)
    sse = float(resid @ resid)
    df = n - 2
    se = math.sqrt(sse / df / sxx)
    if se == 0:
        t = 0.0 if slope == 0 else math.copysign(math.inf, slope)
    else:
        t = slope / se
    p = float(2.0 * stats.t.sf(abs(t), df)) if math.isfinite(t) else 0.0
    return TrendFit(slope, intercept, t, min(1.0, p), n)


def empirical_ccdf(sample: Iterable[float]) -> list[tuple[float, float]]:
    """``(x, P(X >= x))`` at each distinct observed value, ascending in x."""
    x = np.sort(_positive_array(sample))
    n = x.size
    values, first_index = np.unique(x, return_index=True)
    return [(float(v), (n - int(i)) / n) for v, i in zip(values, first_index)]
