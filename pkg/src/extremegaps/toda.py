"""Diagonalization by the Toda flow and the minimal-gap scaling of its run time.

For a real symmetric tridiagonal ``T`` with diagonal ``a`` and off-diagonal
``b``, and ``S`` the skew matrix with ``S_{k,k+1} = b_k = -S_{k+1,k}``, the
flow ``dT/dt = ST - TS`` reads

    da_k/dt = 2 (b_k^2 - b_{k-1}^2),    db_k/dt = b_k (a_{k+1} - a_k),

with ``b_0 = b_n = 0``. The spectrum is invariant, ``a`` tends to the
eigenvalues in decreasing order and each ``b_k`` decays like
``exp(-(lambda_(k) - lambda_(k+1)) t)``. In the particle picture the
asymptotic velocities are ``-2 x`` (eigenvalues of T), which is the form
:func:`predicted_convergence_time` takes.
"""
from dataclasses import dataclass, field

import numpy as np

from ._numerics import TODA_DRIFT, TODA_MAX_STEPS, TODA_UNDERFLOW, toda_integrate
from .ensembles import MAX_QL_SWEEPS, Spectrum, TridiagonalMatrix, eig_sym_tridiagonal, sample_gue_tridiagonal
from .errors import ConvergenceError, NumericalError, ValidationError
from .rng import RngStream, as_generator

RTOL = 1e-9
DRIFT_ABORT = 1e-6
DRIFT_CHECK_EVERY = 100
MAX_STEPS = 2_000_000


def toda_rhs(t):
    """Entrywise derivative ``(da, db)`` of the flow at the tridiagonal matrix ``t``."""
    a, b = t.a, t.b
    b2 = b * b
    da = np.zeros_like(a)
    da[:-1] += 2 * b2
    da[1:] -= 2 * b2
    db = b * (a[1:] - a[:-1])
    return da, db


@dataclass
class TodaState:
    """Current matrix, flow time, and the reference spectrum of the initial matrix."""

    T: TridiagonalMatrix
    t: float
    initial_spectrum: Spectrum


@dataclass
class TodaResult:
    t_conv: float
    state: TodaState
    diagnostics: dict = field(default_factory=dict)


def integrate_toda(t0, eps, rtol=RTOL, atol=None, max_steps=MAX_STEPS, check_every=DRIFT_CHECK_EVERY):
    """Run the Toda flow from ``t0`` until every ``|b_k|`` is below ``eps``.

    Dormand-Prince 5(4) with a PI step-size controller. The first crossing
    time is located by bisection on the size of the last step. The spectral
    drift (against the eigenvalues of ``t0``) is checked every
    ``check_every`` accepted steps and at the end; a drift above
    ``1e-6 * ||T0||`` aborts with :class:`NumericalError`.

    Returns a :class:`TodaResult` with ``diagnostics`` holding the step
    counts, the maximal drift relative to ``||T0||`` and the trace drift.
    """
    if not eps > 0:
        raise ValidationError("eps must be positive")
    n = t0.n
    scale = t0.norm()
    reference = eig_sym_tridiagonal(t0).values
    # components already far below eps need no relative accuracy, but a loose
    # atol lets the spectrum wander over long runs when eps is large
    atol = min(1e-3 * eps, 1e-9 * scale) if atol is None else atol
    y = np.concatenate([t0.a, t0.b])
    trace0 = float(np.sum(t0.a))
    if n == 1 or np.max(np.abs(t0.b)) < eps:
        diag = {"steps": 0, "rejected": 0, "max_drift": 0.0, "trace_drift": 0.0, "bmax_monotone": True}
        return TodaResult(0.0, TodaState(t0, 0.0, Spectrum(reference)), diag)
    t, status, steps, rejected, drift, monotone = toda_integrate(
        y, eps, rtol, atol, max_steps, check_every, reference, DRIFT_ABORT * scale, MAX_QL_SWEEPS
    )
    if status == TODA_MAX_STEPS:
        raise ConvergenceError(f"Toda flow did not reach eps={eps} within {max_steps} steps (t={t})")
    if status == TODA_UNDERFLOW:
        raise ConvergenceError(f"step size underflow at t={t}")
    if status == TODA_DRIFT:
        raise NumericalError(f"spectral drift {drift:.3e} exceeds {DRIFT_ABORT}*||T0|| at t={t}")
    diag = {
        "steps": int(steps),
        "rejected": int(rejected),
        "max_drift": float(drift / scale),
        "trace_drift": abs(float(np.sum(y[:n])) - trace0),
        "bmax_monotone": bool(monotone),
    }
    state = TodaState(TridiagonalMatrix(y[:n].copy(), y[n:].copy()), t, Spectrum(reference))
    return TodaResult(float(t), state, diag)


def moser_velocities(eigenvalues):
    """Asymptotic particle velocities ``-2 lambda`` of the Toda lattice, sorted ascending."""
    lam = np.asarray(getattr(eigenvalues, "values", eigenvalues), dtype=float)
    return np.sort(-2 * lam)


def predicted_convergence_time(velocities, eps):
    """Leading-order time for all ``b_k`` to fall below ``eps``: ``2 log(1/eps) / min gap``.

    ``velocities`` are the asymptotic velocities (see :func:`moser_velocities`);
    the unknown phase offsets of the scattering are ignored.
    """
    v = np.sort(np.asarray(getattr(velocities, "values", velocities), dtype=float))
    if not 0 < eps < 1:
        raise ValidationError("eps must lie in (0, 1)")
    gap = np.min(np.diff(v)) if v.size > 1 else np.inf
    if not gap > 0:
        raise ValidationError("velocities must be distinct")
    return 2 * np.log(1 / eps) / gap


@dataclass(frozen=True)
class ExponentFit:
    """Log-log slope of per-size medians with a bootstrap confidence interval."""

    slope: float
    ci_low: float
    ci_high: float
    intercept: float
    sizes: tuple
    medians: tuple

    def as_dict(self):
        return {
            "slope": self.slope,
            "ci": [self.ci_low, self.ci_high],
            "intercept": self.intercept,
            "sizes": list(self.sizes),
            "medians": list(self.medians),
        }


def fit_exponent(sizes, samples, bootstrap=1000, seed=0, level=0.95):
    """Least-squares slope of ``log median(samples[i])`` against ``log sizes[i]``.

    The interval resamples each size's trials with replacement.
    """
    sizes = np.asarray(sizes, dtype=float)
    if sizes.size < 2:
        raise ValidationError("need at least two sizes")
    samples = [np.asarray(s, dtype=float) for s in samples]
    logn = np.log(sizes)
    med = np.array([np.median(s) for s in samples])
    slope, intercept = np.polyfit(logn, np.log(med), 1)
    gen = RngStream(seed).generator()
    boots = np.empty(bootstrap)
    for i in range(bootstrap):
        m = [np.median(s[gen.integers(0, s.size, s.size)]) for s in samples]
        boots[i] = np.polyfit(logn, np.log(m), 1)[0]
    lo, hi = np.quantile(boots, [(1 - level) / 2, (1 + level) / 2])
    return ExponentFit(float(slope), float(lo), float(hi), float(intercept), tuple(sizes.astype(int)), tuple(med))


@dataclass
class ScalingResult:
    convention: str
    eps: float
    min_gap: ExponentFit
    t_conv: ExponentFit | None
    max_drift: float
    per_size: dict


def _gue_start(n, rng, convention):
    t = sample_gue_tridiagonal(n, rng)
    if convention == "unnormalized":
        return TridiagonalMatrix(t.a * np.sqrt(n), t.b * np.sqrt(n))
    return t


def scaling_experiment(n_list, trials, eps=1e-6, seed=0, convention="normalized", integrate=True, sampler=None):
    """Minimal gap and Toda convergence time versus dimension.

    ``convention='normalized'`` uses the semicircle-on-(-2, 2) scaling
    (minimal gap ~ n^{-4/3}); ``'unnormalized'`` multiplies the matrix by
    ``sqrt(n)`` (unit-size entries, minimal gap ~ n^{-5/6}). ``sampler(n,
    rng)`` can replace the GUE tridiagonal model. Trial ``j`` at size ``n``
    uses the stream ``RngStream(seed, stream_id=n * 1000003 + j)``.

    The fitted ``t_conv`` exponent uses ``t_conv / log(1/eps)``.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2 or trials < 1:
        raise ValidationError("need at least two sizes and one trial")
    if convention not in ("normalized", "unnormalized"):
        raise ValidationError(f"unknown convention {convention!r}")
    gaps, times, per_size = [], [], {}
    max_drift = 0.0
    for n in n_list:
        g = np.empty(trials)
        tc = np.empty(trials)
        for j in range(trials):
            gen, _, _ = as_generator(RngStream(seed, stream_id=n * 1_000_003 + j))
            t0 = sampler(n, gen) if sampler else _gue_start(n, gen, convention)
            ev = eig_sym_tridiagonal(t0).values
            g[j] = np.min(np.diff(ev))
            if integrate:
                res = integrate_toda(t0, eps)
                tc[j] = res.t_conv / np.log(1 / eps)
                max_drift = max(max_drift, res.diagnostics["max_drift"])
        gaps.append(g)
        times.append(tc)
        per_size[n] = {"median_min_gap": float(np.median(g))}
        if integrate:
            per_size[n]["median_t_conv"] = float(np.median(tc) * np.log(1 / eps))
    fit_gap = fit_exponent(n_list, gaps, seed=seed)
    fit_t = fit_exponent(n_list, times, seed=seed) if integrate else None
    return ScalingResult(convention, eps, fit_gap, fit_t, max_drift, per_size)
