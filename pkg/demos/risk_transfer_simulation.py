"""
Does the premium transfer the broker's risk fairly?
===================================================

Replays the procurement round many times. When the broker prices with the
prior that actually generates stock levels, the premium equals the realised
excess-purchase cost on average. Pricing with the wrong prior leaves a bias.
"""

# %%
from privmarket import MarketCosts, PrivacyParams, Scenario, binomial, run, uniform, unit_correlation

costs = MarketCosts(c_s=1.0, c_p=2.0, c_q=0.1)
privacy = PrivacyParams(1.5)
n = 100


def show(label, scenario):
    rep = run(scenario)
    gap = rep.metrics["transfer_gap"]
    print(
        f"{label:<38} premium {rep.metrics['premium'].mean:8.4f}  "
        f"excess {rep.metrics['excess_cost'].mean:8.4f}  "
        f"gap {gap.mean:+.4f} +/- {gap.std_error:.4f}  z={rep.gap_z_score():+.1f}"
    )


# %%
# Matched priors: the gap is within a few standard errors of zero.
for prior in (unit_correlation(n, 0.5), binomial(n, 0.5), uniform(n)):
    show(f"matched {prior.describe()}", Scenario(prior, prior, privacy, costs, 50, 100_000, seed=1))

# %%
# Truth is binomial(p = 0.8) but the broker assumes nothing (uniform prior).
# Around k* = 80 the uniform posterior is too wide, so customers over-pay.
for k_star in (50, 70, 80, 90):
    sc = Scenario(binomial(n, 0.8), uniform(n), privacy, costs, k_star, 100_000, seed=1)
    show(f"binomial(0.8) truth, uniform pricing, k*={k_star}", sc)

# %%
# The broker's full cost also covers the query fee and any shortfall it has to
# produce itself at c_p; the option only covers the excess purchases.
rep = run(Scenario(binomial(n, 0.5), binomial(n, 0.5), privacy, costs, 50, 20_000, seed=2))
print(f"\nmean total broker cost {rep.metrics['total_cost'].mean:.3f} "
      f"(of which option-covered excess {rep.metrics['excess_cost'].mean:.3f})")
