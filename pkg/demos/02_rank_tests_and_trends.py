"""
Are overruns systematic?
========================

Exact rank tests on the ratios, then a log-linear trend in outturn cost.
"""

# %%
from fatcost import dataset, stats_core

table = dataset.load_bundled()
ratios = dataset.overrun_ratios(table)

# %%
# Every Games with a known figure ran over budget, so all signed ranks are
# positive and the exact test reaches its smallest attainable p-value.
res = stats_core.wilcoxon_signed_rank(ratios)
print(f"V = {res.statistic:.0f}, p = {res.p_value:.3g} ({res.method})")

# %%
# Summer against winter: no evidence the seasons differ.
res = stats_core.rank_sum(dataset.overrun_ratios(table, "summer"), dataset.overrun_ratios(table, "winter"))
print(f"W = {res.statistic:.0f}, p = {res.p_value:.3f}")

# %%
# Cost grows over time in both cohorts.  The slope is per year on the log scale.
for season in ("summer", "winter"):
    fit = stats_core.log_trend((year, cost) for year, _, cost in dataset.costs(table, season))
    print(f"{season}: {100 * fit.slope:.1f}% per year, p = {fit.p_value:.2g}, n = {fit.n}")
