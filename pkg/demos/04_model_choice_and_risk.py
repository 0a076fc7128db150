"""
Which tail, and what it means for a budget
==========================================

Vuong's test between the two tail models, then mean estimates, the
three-fold risk and the uplift a planner would need.
"""

# %%
import numpy as np

from fatcost import dataset, distfit, model_select, tail_risk

x = np.asarray(dataset.overrun_ratios(dataset.load_bundled()))
xmin = 1.494919

# %%
# With 15 points above the cutoff the test cannot tell the models apart.
pareto = distfit.fit_pareto_hill(x, xmin)
lognormal = distfit.fit_truncated_lognormal(x, xmin)
v = model_select.vuong_test(x, lognormal, pareto, xmin)
print(f"r = {v.r_normalized:+.3f}, p = {v.p_two_sided:.3f}, leaning {v.favored}")

# %%
# Means under different assumptions.  They disagree, and that is the point.
estimates = [
    tail_risk.sample_mean(x),
    tail_risk.plug_in_mean(distfit.fit_lognormal(x)),
    tail_risk.plug_in_mean(pareto),
    tail_risk.spliced_mean(x, pareto),
    tail_risk.shadow_mean_dual(x, 1.0, 10.0),
]
for m in estimates:
    print(f"  {m.method:<20} {m.overrun_pct:7.0f}%")

# %%
print(tail_risk.classify_randomness(pareto.alpha).regime)

# %%
rep = tail_risk.evaluate_heuristics(x, {"lognormal": distfit.fit_lognormal(x), "pareto": pareto})
print(f"P(ratio >= 3) = {rep.p_threefold_empirical:.2f}")
print(rep.verdicts["heuristic_2"])

# %%
# Reference class forecasting: the uplift that keeps the overrun risk at p.
for p in (0.5, 0.2, 0.1):
    print(f"  risk {p:.0%}: uplift {tail_risk.rcf_uplift(x, p).empirical_uplift_pct:.0f}%")
