"""Toda flow run time and the minimal eigenvalue gap.

Run with ``python demos/toda_flow.py``. Takes about a minute.
"""
# %%
import numpy as np

from extremegaps.ensembles import eig_sym_tridiagonal, sample_gue_tridiagonal
from extremegaps.rng import RngStream
from extremegaps.toda import integrate_toda, moser_velocities, predicted_convergence_time, scaling_experiment

# %% [markdown]
# The flow keeps the spectrum fixed and drives the off-diagonal to zero. The
# slowest entry decays at the smallest eigenvalue gap.

# %%
t0 = sample_gue_tridiagonal(32, RngStream(1))
eps = 1e-8
res = integrate_toda(t0, eps)
ev = eig_sym_tridiagonal(t0).values
print(f"t_conv = {res.t_conv:.2f}, predicted {predicted_convergence_time(moser_velocities(ev), eps):.2f}")
print("max |a - eigenvalues| =", np.max(np.abs(res.state.T.a[::-1] - ev)))
print("diagnostics", res.diagnostics)

# %% [markdown]
# Since the minimal gap scales like n^{-4/3}, so does 1/t_conv.

# %%
out = scaling_experiment([32, 64, 128], trials=20, eps=1e-6, seed=3)
print(f"min gap exponent {out.min_gap.slope:.3f} (CI {out.min_gap.ci_low:.2f}..{out.min_gap.ci_high:.2f}), limit -4/3")
print(f"t_conv exponent  {out.t_conv.slope:.3f}, limit 4/3")
