import math

import numpy as np
import pytest
from scipy import stats

from fatcost import distfit, model_select
from fatcost.errors import DegenerateSampleError, EmptyTailError
from fatcost.rng import uniforms

XMIN = 1.494919


@pytest.fixture
def published_models():
    return distfit.ParetoFit(XMIN, 1.711926), distfit.LognormalFit(0.5438, 0.7124, XMIN)


def test_statistic_by_hand(ratios, published_models):
    a, b = published_models
    tail = ratios[ratios >= XMIN]
    la = stats.pareto(b=a.alpha, scale=XMIN).logpdf(tail)
    ln = stats.lognorm(s=b.sigma, scale=math.exp(b.mu))
    lb = ln.logpdf(tail) - ln.logsf(XMIN)
    d = la - lb
    r = d.sum() / (d.std() * math.sqrt(d.size))
    res = model_select.vuong_test(ratios, a, b, XMIN)
    assert res.r_normalized == pytest.approx(r, rel=1e-10)
    assert res.n_tail == 15
    assert res.llr_sum == pytest.approx(d.sum())
    assert np.sign(res.r_normalized) == np.sign(res.llr_sum)


def test_p_identity(ratios, published_models):
    res = model_select.vuong_test(ratios, *published_models, XMIN)
    assert res.p_two_sided == pytest.approx(2 * (1 - stats.norm.cdf(abs(res.r_normalized))), abs=1e-9)


def test_antisymmetry(ratios, published_models):
    a, b = published_models
    ab = model_select.vuong_test(ratios, a, b, XMIN)
    ba = model_select.vuong_test(ratios, b, a, XMIN)
    assert ba.r_normalized == pytest.approx(-ab.r_normalized, abs=1e-12)
    assert ba.p_two_sided == pytest.approx(ab.p_two_sided, abs=1e-15)
    assert ab.favored == "lognormal" and ba.favored == "lognormal"


def test_identical_models(ratios):
    m = distfit.ParetoFit(XMIN, 1.7)
    with pytest.raises(DegenerateSampleError):
        model_select.vuong_test(ratios, m, distfit.ParetoFit(XMIN, 1.7), XMIN)


def test_small_tail(ratios):
    with pytest.raises(EmptyTailError):
        model_select.vuong_test(ratios, distfit.ParetoFit(4.0, 2.0), distfit.LognormalFit(1.0, 1.0), 4.0)


def test_pareto_data_favors_pareto():
    wins, trials = 0, 100
    for run in range(trials):
        x = uniforms(31, [run], 1000)[0] ** (-1 / 1.5)
        pareto = distfit.fit_pareto_hill(x, 1.0)
        lognormal = distfit.fit_lognormal(x)
        wins += model_select.vuong_test(x, pareto, lognormal, 1.0).r_normalized > 0
    assert wins >= 95


def test_truncated_lognormal_cannot_lose_to_pareto():
    # The truncated family reaches the Pareto law in the limit sigma -> inf,
    # so its maximized likelihood is never below the Pareto one.
    for run in range(10):
        x = uniforms(31, [run], 1000)[0] ** (-1 / 1.5)
        pareto = distfit.fit_pareto_hill(x, 1.0)
        lognormal = distfit.fit_truncated_lognormal(x, 1.0)
        assert lognormal.log_likelihood >= pareto.log_likelihood - 1e-3
