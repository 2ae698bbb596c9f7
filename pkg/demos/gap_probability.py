"""Exact CUE gap probabilities from Toeplitz determinants.

Run with ``python demos/gap_probability.py``.
"""
# %%
import numpy as np

from extremegaps.gap_prob import (
    dlog_gap_asymptotic,
    dlog_gap_probability_cue,
    expected_large_gap_count,
    fit_c0,
    fredholm_det,
    gap_probability_cue,
    log_gap_probability_cue,
)
from extremegaps.kernels import KernelHandle

# %% [markdown]
# D_n(alpha) is the probability that an arc of length 2 alpha holds no CUE(n)
# eigenangle. It is computed in log space, so deep tails stay finite.

# %%
n = 200
for na in (10, 30, 60):
    a = na / n
    print(f"n alpha = {na:3d}: log D_n = {log_gap_probability_cue(n, a):10.3f}", end="  ")
    print(f"d/dalpha exact {dlog_gap_probability_cue(n, a):10.2f}  asymptotic {dlog_gap_asymptotic(n, a):10.2f}")

# %%
fit = fit_c0(n)
print(f"fitted c0 = {fit.c0:.6f} +- {fit.stderr:.1e}  (log 2/12 + 3 zeta'(-1) = -0.438501)")

# %% [markdown]
# The same numbers come out of a Nystrom discretization of the CUE kernel on
# the arc, and on the scale pi/n they approach the sine-kernel determinant.

# %%
a = 0.05
print("Toeplitz", gap_probability_cue(n, a), "Fredholm", fredholm_det(KernelHandle.cue(n), (0, 2 * a)))
s = n * a / np.pi
print("sine kernel at the same mean count", fredholm_det(KernelHandle.sine(1.0), (0, s)))

# %% [markdown]
# The expected number of gaps above u = sqrt(lambda log n)/n behaves like
# n^{1 - lambda/32} for large n; at moderate n the lower-order terms are visible.

# %%
for m in (100, 400, 1600):
    r = expected_large_gap_count(m, np.sqrt(16 * np.log(m)) / m)
    print(f"n={m:5d}: E N = {r.value:8.3f}, exponent {r.log_value / np.log(m):.3f} (limit 0.5)")
