"""
How fat is the tail?
====================

Fit a lognormal to all ratios and a power law to the upper tail, and let a
Kolmogorov-Smirnov scan pick where the tail starts.
"""

# %%
import numpy as np

from fatcost import dataset, distfit, stats_core

x = np.asarray(dataset.overrun_ratios(dataset.load_bundled()))

# %%
ln = distfit.fit_lognormal(x)
print(f"lognormal mu={ln.mu:.3f} sigma={ln.sigma:.3f} excess kurtosis={distfit.lognormal_kurtosis(ln):.2f}")

# %%
# A power law fitted from the smallest observation puts alpha near 1.2,
# close to the edge where the mean stops existing.
print("Hill alpha from the minimum:", round(distfit.fit_pareto_hill(x, x.min()).alpha, 3))

# %%
# The scan tries every observed value as a cutoff and keeps the one whose
# fitted tail is closest to the data.
scan = distfit.select_xmin(x)
print(f"xmin={scan.xmin}  alpha={scan.alpha:.3f}  KS={scan.ks_distance:.3f}  n_tail={scan.n_tail}")

# %%
# The empirical survival curve next to both models.
tail = distfit.fit_pareto_hill(x, scan.xmin)
for xi, p in stats_core.empirical_ccdf(x)[::3]:
    p_par = distfit.tail_probability(tail, xi) * scan.n_tail / x.size if xi >= scan.xmin else float("nan")
    print(f"  x={xi:5.2f}  data={p:.3f}  lognormal={distfit.tail_probability(ln, xi):.3f}  pareto={p_par:.3f}")

# %%
# A generalized Pareto fit to the exceedances over 1.0.
gpd = distfit.fit_gpd(x, 1.0)
print(f"GPD shape={gpd.shape:.3f} scale={gpd.scale:.3f}")
