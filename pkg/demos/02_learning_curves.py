# %% [markdown]
# # Learning curves
#
# The learning error eps_n = alpha0 - (1-U)_n measures how far stage n still
# is from the best possible employment. Under a fixed stage-wise mismatch it
# decays geometrically.

# %%
from __future__ import annotations

import numpy as np

from laborsim import CumulativeSeries, MarketConfig, learning_curve, run_stages
from laborsim.analytics import asymptotic_limits

# %% [markdown]
# A constant stage-wise U gives eps_n = U^(n+1) for alpha = 1.

# %%
u = 0.4
cum = tuple(1 - u ** (n + 1) for n in range(8))
eps = learning_curve(CumulativeSeries("const", 1.0, cum), include_start=True)
print(np.round(eps, 6))
print(np.round(u ** np.arange(len(eps)), 6))

# %% [markdown]
# Simulated curves for three market balances, same seed each time.

# %%
for alpha in (0.5, 1.0, 2.0):
    cfg = MarketConfig(job_offer_ratio=alpha, seed=20)
    recs = run_stages(cfg, 12, np.random.default_rng(20))
    err = [r.error for r in recs]
    print(f"alpha={alpha}: " + " ".join(f"{e:.3f}" for e in err[:8]))

# %% [markdown]
# Where each regime ends up as n grows.

# %%
for alpha in (0.5, 1.0, 2.0):
    lim = asymptotic_limits(alpha)
    print(alpha, lim)
