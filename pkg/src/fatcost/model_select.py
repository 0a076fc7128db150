"""Vuong's likelihood-ratio test for non-nested tail models."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import stats

from .distfit import Fit, conditional_logpdf, tail_of
from .errors import DataError, DegenerateSampleError, EmptyTailError


@dataclass(frozen=True)
class VuongResult:
    r_normalized: float  # > 0 favors model A
    p_two_sided: float
    n_tail: int
    per_point_llr_sd: float
    llr_sum: float
    model_a: str = ""
    model_b: str = ""

    @property
    def favored(self) -> str:
        return self.model_a if self.r_normalized > 0 else self.model_b


def vuong_test(sample: Iterable[float], model_a: Fit, model_b: Fit, xmin: float) -> VuongResult:
    """Compare two fits on the tail ``x >= xmin``.

    Per-point log-likelihood ratios use both densities conditioned on
    ``X >= xmin``.  The statistic is ``sum(l) / (sd(l) * sqrt(n))`` with the
    divisor-n standard deviation; the p-value is two-sided under the
    standard normal.
    """
    tail = tail_of(sample, xmin)
    n = tail.size
    if n < 5:
        raise EmptyTailError(f"Vuong test needs at least 5 tail values, got {n}")
    for model in (model_a, model_b):
        if model.support_min > xmin * (1 + 1e-12):
            raise DataError(f"{model.kind} support starts at {model.support_min:g}, above xmin={xmin:g}")
    llr = conditional_logpdf(model_a, tail, xmin) - conditional_logpdf(model_b, tail, xmin)
    if not np.all(np.isfinite(llr)):
        raise DataError("a tail value lies outside one model's support")
    total = float(llr.sum())
    sd = float(np.std(llr))
    if not sd > 1e-12 * max(1.0, float(np.max(np.abs(llr)))):
        raise DegenerateSampleError("log-likelihood ratios have zero variance; models coincide on the tail")
    r = total / (sd * math.sqrt(n))
    p = float(2.0 * stats.norm.sf(abs(r)))
    return VuongResult(r, p, int(n), sd, total, model_a.kind, model_b.kind)
