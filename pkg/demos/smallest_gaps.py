"""Smallest eigenvalue gaps of CUE and GUE matrices.

Run with ``python demos/smallest_gaps.py``. Takes about a minute.
"""
# %%
import numpy as np
from scipy.special import gammaincinv

from extremegaps.ensembles import sample_cue_eigenangles, sample_gue_spectrum
from extremegaps.extreme_stats import (
    bulk_gaps,
    circular_gaps,
    ks_critical_value,
    ks_statistic,
    kth_smallest_limit_cdf,
    normalize_smallest_cue,
    normalize_smallest_gue,
)
from extremegaps.rng import RngStream

# %% [markdown]
# The smallest of the n gaps of a CUE(n) matrix lives on the scale n^{-4/3}.
# After multiplying by n^{4/3} (72 pi)^{-1/3} the k-th smallest gap has the
# limit CDF P(Gamma(k, 1) <= x^3).

# %%
n, trials = 200, 3000
tau = np.array(
    [
        normalize_smallest_cue(circular_gaps(sample_cue_eigenangles(n, RngStream(1, j), "cmv")).smallest(3)[0], n)
        for j in range(trials)
    ]
)
for k in (1, 2, 3):
    d = ks_statistic(tau[:, k - 1], lambda x, k=k: kth_smallest_limit_cdf(k, x))
    print(f"CUE k={k}: KS distance {d:.4f}  (5% critical value {ks_critical_value(trials):.4f})")

# %%
# median against the limit law
print("medians", np.median(tau, axis=0).round(3))
print("limit  ", np.cbrt(gammaincinv([1, 2, 3], 0.5)).round(3))

# %% [markdown]
# For GUE the same law holds for gaps starting inside a bulk interval I, after
# a normalization that integrates (4 - x^2)^2 over I.

# %%
interval = (-1.0, 1.0)
tau = []
for j in range(trials):
    g = bulk_gaps(sample_gue_spectrum(n, RngStream(2, j), "tridiagonal"), interval)
    tau.append(normalize_smallest_gue(g.smallest(1)[0][0], n, interval))
d = ks_statistic(tau, lambda x: kth_smallest_limit_cdf(1, x))
print(f"GUE k=1 on I={interval}: KS distance {d:.4f}")
