"""
Cost overruns of the Games: the data
====================================

Load the bundled table, turn percentage overruns into ratios and look at
the cohorts.
"""

# %%
# The bundled table has one row per edition; 19 of them carry an overrun.
import numpy as np

from fatcost import dataset, stats_core

table = dataset.load_bundled()
sample = dataset.overrun_ratios(table)
x = np.asarray(sample)
print(len(table), "editions,", len(x), "with a known overrun")

# %%
# A ratio of 2 means the Games cost twice the estimate.
for season in ("all", "summer", "winter"):
    s = stats_core.summary(dataset.overrun_ratios(table, season), [1.5, 2.0, 3.0])
    print(f"{season:>6}: n={s.n:2d}  mean={s.mean:.2f}  median={s.median:.2f}  "
          f"share>1.5={s.proportion_above(1.5):.2f}")

# %%
# The largest overruns, by name.
order = np.argsort(x)[::-1][:5]
for i in order:
    print(f"  {sample.labels[i]:<22} {100 * (x[i] - 1):6.0f}%")

# %%
# Outturn cost per event and per athlete, in million 2015 USD.
units = dataset.derive_unit_costs(table)
top = sorted(units, key=lambda u: u.cost_per_athlete, reverse=True)[:3]
for u in top:
    print(f"  {u.name:<22} {u.cost_per_event:8.1f} per event  {u.cost_per_athlete:5.2f} per athlete")
