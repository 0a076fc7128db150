"""Seeded Monte Carlo demonstrations of fat-tail behaviour.

All draws use inverse-transform sampling on the counter-based uniforms of
:mod:`fatcost.rng`; run ``r`` of an experiment seeded with ``seed`` always
sees the same stream, whatever the degree of parallelism.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .rng import norm_ppf, uniforms
from .tail_risk import regime_for

QUANTILES = (0.05, 0.5, 0.95)
_NORM_Q75 = 0.6744897501960817


@dataclass(frozen=True)
class SimDistribution:
    kind: str  # "pareto" | "lognormal" | "gaussian"
    a: float  # alpha | mu | mean
    b: float  # xmin | sigma | sd

    def __post_init__(self):
        if self.kind not in ("pareto", "lognormal", "gaussian"):
            raise DataError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "pareto" and not (self.a > 0 and self.b > 0):
            raise DataError("pareto needs alpha > 0 and xmin > 0")
        if self.kind in ("lognormal", "gaussian") and not self.b > 0:
            raise DataError(f"{self.kind} needs a positive scale")

    @classmethod
    def pareto(cls, alpha, xmin=1.0):
        return cls("pareto", float(alpha), float(xmin))

    @classmethod
    def lognormal(cls, mu, sigma):
        return cls("lognormal", float(mu), float(sigma))

    @classmethod
    def gaussian(cls, mean, sd):
        return cls("gaussian", float(mean), float(sd))

    @classmethod
    def parse(cls, spec: str) -> "SimDistribution":
        """Parse ``pareto:ALPHA:XMIN``, ``lognormal:MU:SIGMA`` or ``gaussian:MEAN:SD``."""
        parts = spec.split(":")
        if len(parts) != 3:
            raise DataError(f"distribution spec {spec!r} must look like kind:p1:p2")
        try:
            a, b = float(parts[1]), float(parts[2])
        except ValueError:
            raise DataError(f"distribution spec {spec!r} has non-numeric parameters") from None
        return cls(parts[0].strip().lower(), a, b)

    def __str__(self):
        return f"{self.kind}:{self.a:g}:{self.b:g}"

    def from_uniform(self, u):
        """Inverse-transform map used for sampling (Pareto reads ``u`` as a survival level)."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind == "pareto":
            return self.b * u ** (-1.0 / self.a)
        z = norm_ppf(u)
        if self.kind == "lognormal":
            return np.exp(self.a + self.b * z)
        return self.a + self.b * z

    def quantile(self, p):
        p = np.asarray(p, dtype=np.float64)
        return self.from_uniform(1.0 - p) if self.kind == "pareto" else self.from_uniform(p)

    @property
    def regime(self) -> str | None:
        return regime_for(self.a) if self.kind == "pareto" else None


@dataclass(frozen=True)
class SimulationTrace:
    distribution: str
    seed: int
    runs: int
    horizon: int
    running_mean_quantiles: np.ndarray  # (horizon, 3): q05, q50, q95 at steps 1..horizon
    record_count_mean: float
    max_exceed_prob: float
    regime: str | None = None

    def band_width(self, step: int) -> float:
        q = self.running_mean_quantiles[step - 1]
        return float(q[2] - q[0])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "q05", "q50", "q95"])
        for step, (lo, mid, hi) in enumerate(self.running_mean_quantiles.tolist(), start=1):
            w.writerow([step, repr(lo), repr(mid), repr(hi)])
        return buf.getvalue()

    def summary(self) -> dict:
        last = self.running_mean_quantiles[-1].tolist()
        flags = []
        if self.regime == "infinite_mean":
            flags.append("infinite-mean regime")
        elif self.regime == "levy_stable":
            flags.append("infinite-variance regime")
        return {
            "distribution": self.distribution,
            "seed": self.seed,
            "runs": self.runs,
            "horizon": self.horizon,
            "regime": self.regime,
            "flags": flags,
            "final_q05": last[0],
            "final_q50": last[1],
            "final_q95": last[2],
            "record_count_mean": self.record_count_mean,
            "max_exceed_prob": self.max_exceed_prob,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2) + "\n"


def sample(dist: SimDistribution, n: int, seed: int, run: int = 0) -> np.ndarray:
    """``n`` draws from stream ``run`` of ``seed``."""
    if n < 1:
        raise DataError("sample size must be at least 1")
    return dist.from_uniform(uniforms(seed, [run], n)[0])


def draw_matrix(dist: SimDistribution, runs: int, n: int, seed: int, workers: int = 1) -> np.ndarray:
    """Draws with shape ``(runs, n)``; row ``r`` is stream ``r``."""
    if workers <= 1 or runs < 2:
        return dist.from_uniform(uniforms(seed, np.arange(runs), n))
    chunks = np.array_split(np.arange(runs), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda idx: dist.from_uniform(uniforms(seed, idx, n)), [c for c in chunks if c.size]))
    return np.vstack(parts)


def _records(x):
    running_max = np.maximum.accumulate(x, axis=1)
    new_record = np.ones_like(x, dtype=bool)
    new_record[:, 1:] = x[:, 1:] > running_max[:, :-1]
    return new_record.sum(axis=1)


def running_mean_experiment(
    dist: SimDistribution, horizon: int, runs: int, seed: int, workers: int = 1
) -> SimulationTrace:
    """Cross-run quantiles of the running mean at every step.

    Also reports the mean number of records per run and the share of runs
    whose second-half maximum beats the first-half maximum.
    """
    if horizon < 10:
        raise DataError("horizon must be at least 10")
    if runs < 1:
        raise DataError("runs must be at least 1")
    x = draw_matrix(dist, runs, horizon, seed, workers)
    running = np.cumsum(x, axis=1) / np.arange(1, horizon + 1)
    quantiles = np.quantile(running, QUANTILES, axis=0).T
    half = horizon // 2
    exceed = float(np.mean(x[:, half:].max(axis=1) > x[:, :half].max(axis=1)))
    return SimulationTrace(
        distribution=str(dist),
        seed=int(seed),
        runs=int(runs),
        horizon=int(horizon),
        running_mean_quantiles=quantiles,
        record_count_mean=float(_records(x).mean()),
        max_exceed_prob=exceed,
        regime=dist.regime,
    )


def record_exceedance(
    dist: SimDistribution, history: int, future: int, runs: int, seed: int, workers: int = 1
) -> float:
    """Share of runs in which the largest of ``future`` new draws beats the ``history`` maximum."""
    if history < 1 or future < 1:
        raise DataError("history and future must each be at least 1")
    if runs < 1:
        raise DataError("runs must be at least 1")
    x = draw_matrix(dist, runs, history + future, seed, workers)
    return float(np.mean(x[:, history:].max(axis=1) > x[:, :history].max(axis=1)))


def mean_dispersion(dist: SimDistribution, sample_size: int, runs: int, seed: int, workers: int = 1) -> float:
    """Interquartile range of per-run sample means divided by their median."""
    if sample_size < 2:
        raise DataError("sample_size must be at least 2")
    if runs < 30:
        raise DataError("runs must be at least 30")
    means = draw_matrix(dist, runs, sample_size, seed, workers).mean(axis=1)
    q1, med, q3 = np.percentile(means, [25, 50, 75])
    return float((q3 - q1) / med)


def matched_gaussian(dist: SimDistribution) -> SimDistribution:
    """Gaussian with the same median and interquartile range as ``dist``."""
    q1, med, q3 = dist.quantile(np.array([0.25, 0.5, 0.75]))
    return SimDistribution.gaussian(float(med), float(q3 - q1) / (2.0 * _NORM_Q75))


def band_shrink_ratio(trace: SimulationTrace, early: int, late: int) -> float:
    """Ratio of q05-q95 band widths at ``early`` and ``late`` steps; ~sqrt(late/early) under the CLT."""
    w_late = trace.band_width(late)
    return trace.band_width(early) / w_late if w_late > 0 else math.inf
