"""
What the broker believes after a noisy declaration
==================================================

The posterior over the true stock level for a single declaration under each
prior, and how it collapses back to the prior when the noise is huge.
"""

# %%
import numpy as np

from privmarket import PrivacyParams, binomial, posterior, uniform, unit_correlation

n = 20
x = 13.4

# %%
for lam in (1.5, 0.3, 1e-6):
    print(f"\nlambda = {lam}")
    for prior in (unit_correlation(n, 0.5), binomial(n, 0.5), uniform(n)):
        post = posterior(prior, PrivacyParams(lam), x)
        w = post.weights()
        top = np.argsort(w)[::-1][:3]
        shown = ", ".join(f"P[k={i}]={w[i]:.3f}" for i in top)
        print(f"  {prior.describe():<24} mean={post.mean():6.2f}  {shown}")

# %%
# With lambda -> 0 the declaration carries no information: the posterior mean
# returns to the prior mean (n/2 for all three priors at p = 0.5).

# %%
# Declarations are never clamped. A value far outside [0, n] is still a valid
# observation; the posterior simply concentrates on the nearest end.
post = posterior(binomial(n, 0.5), PrivacyParams(1.5), -4.0)
print(f"\nx = -4: posterior mean {post.mean():.3f}, P[k=0] = {post.weights()[0]:.3f}")
