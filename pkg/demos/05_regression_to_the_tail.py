"""
Regression to the tail
======================

Simulated sequences show why a sample mean from a fat-tailed process is a
poor guide to the next value.
"""

# %%
from fatcost.tail_sim import (
    SimDistribution, band_shrink_ratio, matched_gaussian, mean_dispersion, record_exceedance,
    running_mean_experiment,
)

# %%
# Under a thin tail the spread of running means shrinks like 1/sqrt(n).
# Under alpha = 1.2 it barely moves, and under alpha = 0.8 it keeps drifting up.
for spec in ("gaussian:2.7:1.5", "pareto:3:1", "pareto:1.2:1", "pareto:0.8:1"):
    trace = running_mean_experiment(SimDistribution.parse(spec), 10_000, 200, seed=0)
    q = trace.running_mean_quantiles
    print(f"{spec:<18} band shrink 100->10000: {band_shrink_ratio(trace, 100, 10_000):5.1f}  "
          f"median mean at 100: {q[99, 1]:.2f}, at 10000: {q[-1, 1]:.2f}")

# %%
# A new record is as likely as not after as many draws again, and four
# times as many more draws make it four in five.  This holds for any tail.
d = SimDistribution.pareto(1.2)
print(record_exceedance(d, 19, 19, 2000, seed=1), record_exceedance(d, 19, 76, 2000, seed=1))

# %%
# How much do means of 19 draws vary, compared with a gaussian of equal
# median and interquartile range?
fat = mean_dispersion(d, 19, 2000, seed=2)
thin = mean_dispersion(matched_gaussian(d), 19, 2000, seed=2)
print(f"relative IQR of the mean: pareto {fat:.3f}, gaussian {thin:.3f}, ratio {fat / thin:.2f}")
