# %% [markdown]
# # Calibrating the ranking strength gamma
#
# Given an observed long-run unemployment rate, find the gamma at which the
# simulated market reproduces it. U(gamma) is a noisy Monte Carlo estimate,
# so the search stops once the bracket is inside the noise.

# %%
from __future__ import annotations

import math

from laborsim import MarketConfig, calibrate_gamma, estimate_u

cfg = MarketConfig(n_students=400, n_companies=20, letters_per_student=5, seed=3)

# %% [markdown]
# First the shape of U(gamma) on a small ladder.

# %%
for g in (0.0, 2.0, 5.0, 10.0):
    est = estimate_u(g, cfg, replicates=8, horizon=20)
    print(f"gamma={g:>4}: U = {est.mean:.4f} +- {est.stderr:.4f}")

# %% [markdown]
# Closed loop: simulate at gamma* = 6, then recover it from U alone.

# %%
target = estimate_u(6.0, cfg, replicates=16, horizon=20)
res = calibrate_gamma(target.mean, cfg, replicates=8, horizon=20, tolerance=0.1,
                      target_stderr=target.stderr)
print(f"gamma_hat = {res.gamma_hat:.3f}  ({res.converged_by}, {res.iterations} iterations)")
print(f"bracket = {res.bracket}, consistent with the noise on {res.consistent_interval}")
gap = abs(res.achieved_u - target.mean)
print(f"|U(gamma_hat) - U*| = {gap:.2e}, 2 sigma = {2 * math.hypot(res.achieved_stderr, target.stderr):.2e}")

# %%
for p in res.trace:
    print(f"{p.gamma:8.4f}  U={p.u:.4f}  [{p.low:.3f}, {p.high:.3f}]")
