"""
Option price versus declared availability
=========================================

Normalised premium ``c_opt / (c_s n)`` as the noisy declaration sweeps from 0
to n, for the three availability models (n = 100 suppliers, lambda = 1.5).
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from privmarket import PrivacyParams, binomial, uniform, unit_correlation
from privmarket.pricing import price_many

OUT = Path(__file__).with_name("_output")
OUT.mkdir(exist_ok=True)

n = 100
privacy = PrivacyParams(1.5)
xs = np.arange(0, n + 1, dtype=float)

# %%
# Fully correlated suppliers: the price flips from ~0 to ~1 - k*/n at x = n/2.
fig, axes = plt.subplots(1, 3, figsize=(13, 3.8), sharey=True)
for k_star in (20, 50, 80):
    axes[0].plot(xs, price_many(1.0, privacy, unit_correlation(n, 0.5), k_star, xs) / n, label=f"k*={k_star}")
axes[0].set_title("unit correlation, p = 0.5")

# %%
# Independent suppliers: a smooth transition, and a visibly non-zero floor
# when demand is low.
for k_star in (20, 50, 80):
    axes[1].plot(xs, price_many(1.0, privacy, binomial(n, 0.5), k_star, xs) / n, label=f"k*={k_star}")
axes[1].set_title("independent suppliers, p = 0.5")
low = price_many(1.0, privacy, binomial(n, 0.5), 20, [0.0])[0] / n
print(f"binomial floor at k*=20: {low:.4f}")

# %%
# Uniform prior: a piecewise-linear curve with its knee at x = k*.
for k_star in (20, 50, 80):
    axes[2].plot(xs, price_many(1.0, privacy, uniform(n), k_star, xs) / n, label=f"k*={k_star}")
    axes[2].plot(xs, np.maximum(xs - k_star, 0) / n, "k:", lw=0.8)
axes[2].set_title("uniform")

for ax in axes:
    ax.set_xlabel("declared availability x")
    ax.legend()
axes[0].set_ylabel("normalised option price")
fig.tight_layout()
fig.savefig(OUT / "price_curves.png", dpi=120)

# %%
# Effect of individual availability probability on the binomial price (k* = 50).
fig, ax = plt.subplots(figsize=(5, 3.8))
for p in (0.3, 0.5, 0.7):
    ax.plot(xs, price_many(1.0, privacy, binomial(n, p), 50, xs) / n, label=f"p={p}")
ax.set_xlabel("declared availability x")
ax.set_ylabel("normalised option price")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "binomial_vs_p.png", dpi=120)
print(f"figures written to {OUT}")
