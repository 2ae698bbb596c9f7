"""Extreme gaps between zeros of the Riemann zeta function.

Run with ``python demos/zeta_gaps.py``.
"""
# %%
import numpy as np

from extremegaps.zeta import bundled_zeros_path, load_zeros, max_gap_report, normalized_gaps, small_gap_histogram

# %%
z = load_zeros(bundled_zeros_path())
g = normalized_gaps(z)
print(f"{len(z)} zeros, mean normalized gap {g.mean():.4f}")

# %% [markdown]
# The GUE prediction for the largest of n normalized gaps is sqrt(32 log n)/(2 pi).

# %%
for n in (1000, 10_000, len(z) - 1):
    r = max_gap_report(z, n)
    print(f"n={n:6d}: largest {r.observed:.3f} at zero #{r.index}, predicted {r.predicted:.3f}")

# %% [markdown]
# The 1000 smallest values of 2 pi n^{1/3} g_i should be spread like u^2/(24 pi).

# %%
h = small_gap_histogram(z)
for lo, c, e in zip(h.edges[:-1], h.counts, h.expected):
    print(f"[{lo:5.1f}, {lo + h.bin_width:5.1f}): {c:4d} observed, {e:7.1f} expected")
print(f"log-log slope {h.loglog_slope():.2f} (limit 2)")
