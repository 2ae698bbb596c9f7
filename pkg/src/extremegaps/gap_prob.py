"""Vacuum probabilities: CUE Toeplitz determinants and Fredholm determinants.

The probability that CUE(n) has no eigenangle in an arc of length ``2 alpha``
is the Toeplitz determinant ``D_n(alpha)`` with symbol the indicator of the
complementary arc ``(alpha, 2 pi - alpha)``. It is computed here through the
orthogonal polynomials of that arc: the Cholesky pivots of the Toeplitz
matrix are the squared norms of the monic orthogonal polynomials, which are
generated by the Szego recursion with inner products taken by Gauss-Legendre
quadrature on the arc. Nothing is formed as a difference of nearly equal
numbers, so ``log D_n`` stays accurate far below the double-precision range.

Fredholm determinants ``det(I - K_A)`` use the Nystrom discretization on
Gauss-Legendre panels, one panel per interval of ``A``.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import leggauss

from .errors import ConvergenceError, NumericalError, ValidationError
from .kernels import KernelHandle, kernel_eval
from .ensembles import semicircle_density

LOG_TINY = np.log(1e-300)
FREDHOLM_TOL = 1e-8
FREDHOLM_M_MAX = 512


def _check_alpha(alpha):
    if not 0 <= alpha < np.pi:
        raise ValidationError(f"half arc length must lie in [0, pi), got {alpha!r}")


def toeplitz_symbol_coeff(alpha, m):
    """Fourier coefficient c_m of the indicator of the arc (alpha, 2 pi - alpha).

    ``c_0 = 1 - alpha/pi`` and ``c_m = -sin(m alpha) / (pi m)``; even in ``m``.
    """
    m = np.asarray(m)
    mm = np.where(m == 0, 1, np.abs(m))
    out = np.where(m == 0, 1 - alpha / np.pi, -np.sin(mm * alpha) / (np.pi * mm))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class ToeplitzGapMatrix:
    """Hermitian Toeplitz matrix ``(c_{j-k})`` whose determinant is ``D_n(alpha)``."""

    n: int
    alpha: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        _check_alpha(self.alpha)

    @property
    def coefficients(self):
        return toeplitz_symbol_coeff(self.alpha, np.arange(self.n))

    def to_dense(self):
        return scipy.linalg.toeplitz(self.coefficients)


def log_gap_probability_cue(n, alpha, nodes=None):
    """``log D_n(alpha)``, the log-probability that CUE(n) avoids an arc of length 2 alpha.

    ``nodes`` sets the quadrature order on the arc (default ``max(2n, 64) + 32``).
    """
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    _check_alpha(alpha)
    n = int(n)
    if alpha == 0:
        return 0.0
    m = nodes or max(2 * n, 64) + 32
    x, w = leggauss(m)
    length = 2 * np.pi - 2 * alpha
    theta = alpha + (x + 1) * length / 2
    w = w * length / (4 * np.pi)
    z = np.exp(1j * theta)

    mu0 = w.sum()
    phi = np.full(m, 1 / np.sqrt(mu0), dtype=complex)  # orthonormal phi_k on the nodes
    phis = phi.copy()  # reversed polynomial phi_k^*
    logd = n * np.log(mu0)
    for k in range(n - 1):
        zphi = z * phi
        coef = np.sum(w * zphi * np.conj(phis))
        new = zphi - coef * phis
        news = phis - np.conj(coef) * zphi
        nu = np.sum(w * np.abs(new) ** 2)
        if not nu > 0:
            raise NumericalError(f"non-positive Toeplitz pivot at k={k} (n={n}, alpha={alpha})")
        logd += (n - 1 - k) * np.log(nu)
        s = np.sqrt(nu)
        phi, phis = new / s, news / s
    return float(logd)


def gap_probability_cue(n, alpha):
    """``D_n(alpha)``: probability that no CUE(n) eigenangle lies in an arc of length 2 alpha."""
    return float(np.exp(log_gap_probability_cue(n, alpha)))


def log_gap_asymptotic(n, alpha, c0):
    """Large-n expansion ``n^2 log cos(a/2) - log(n sin(a/2))/4 + c0`` of ``log D_n``."""
    return n**2 * np.log(np.cos(alpha / 2)) - 0.25 * np.log(n * np.sin(alpha / 2)) + c0


def dlog_gap_asymptotic(n, alpha):
    """Large-n expansion ``-n^2 tan(a/2)/2 - cot(a/2)/8`` of ``d/dalpha log D_n``."""
    return -(n**2) / 2 * np.tan(alpha / 2) - 1 / (8 * np.tan(alpha / 2))


def dlog_gap_probability_cue(n, alpha, rel_step=1e-4):
    """``d/dalpha log D_n(alpha)`` by centered differences with one Richardson step.

    The step is ``rel_step * alpha``; differencing the logarithm keeps the
    result meaningful when ``D_n`` itself is far below 1e-300.
    """
    _check_alpha(alpha)
    if alpha == 0:
        raise ValidationError("derivative needs alpha > 0")
    h = rel_step * alpha
    if alpha + h >= np.pi:
        raise ValidationError("alpha too close to pi for a centered difference")

    def central(step):
        return (log_gap_probability_cue(n, alpha + step) - log_gap_probability_cue(n, alpha - step)) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


@dataclass(frozen=True)
class C0Fit:
    """Fitted constant of the log-determinant expansion with its standard error."""

    c0: float
    stderr: float
    n: int
    points: int


def fit_c0(n, nalpha=None):
    """Fit the constant term of the ``log D_n`` expansion.

    Regresses the residual ``log D_n - n^2 log cos(a/2) + log(n sin(a/2))/4``
    on ``1, 1/(n sin(a/2)), 1/(n sin(a/2))^2`` over the grid ``n alpha`` in
    ``nalpha`` (default 20..60), and returns the intercept.
    """
    nalpha = np.linspace(20, 60, 21) if nalpha is None else np.asarray(nalpha, dtype=float)
    alpha = nalpha / n
    if np.any(alpha >= np.pi):
        raise ValidationError("n*alpha grid leaves (0, pi)")
    resid = np.array([log_gap_probability_cue(n, a) for a in alpha]) - log_gap_asymptotic(n, alpha, 0.0)
    v = 1 / (n * np.sin(alpha / 2))
    design = np.column_stack([np.ones_like(v), v, v**2])
    coef, *_ = np.linalg.lstsq(design, resid, rcond=None)
    dof = max(len(v) - 3, 1)
    sigma2 = np.sum((resid - design @ coef) ** 2) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return C0Fit(float(coef[0]), float(np.sqrt(cov[0, 0])), int(n), len(v))


@dataclass(frozen=True)
class LargeGapCount:
    """Expected number of CUE gaps larger than u.

    ``value`` is 0 with ``underflow=True`` when ``D_n`` drops below 1e-300;
    ``log_value`` is finite either way.
    """

    value: float
    log_value: float
    underflow: bool


def expected_large_gap_count(n, u):
    """Expected number of circular gaps of CUE(n) larger than ``u``.

    Equals ``-pi dD_n/dalpha`` at ``alpha = u/2``: the density of the gap
    to the right of an eigenangle is the derivative of the vacuum
    probability of the arc, and rotation invariance spreads the n gaps
    uniformly over the circle of length 2 pi.
    """
    if not 0 < u < 2 * np.pi:
        raise ValidationError(f"gap threshold must lie in (0, 2 pi), got {u!r}")
    alpha = u / 2
    logd = log_gap_probability_cue(n, alpha)
    dlog = dlog_gap_probability_cue(n, alpha)
    if not dlog < 0:
        raise NumericalError(f"log D_n not decreasing at alpha={alpha} (n={n})")
    log_value = np.log(np.pi) + np.log(-dlog) + logd
    underflow = logd < LOG_TINY
    value = 0.0 if underflow else float(np.exp(log_value))
    return LargeGapCount(value, float(log_value), bool(underflow))


def expected_box_count_cue(n, a_box, i_box):
    """Exact mean number of CUE(n) gaps with ``n^{4/3} t`` in ``(u0, u1]`` and left endpoint in I.

    The finite-n counterpart of :func:`extremegaps.extreme_stats.cue_intensity`.
    Rotation invariance makes the location uniform, so this is the
    difference of two large-gap counts times ``|I| / (2 pi)``.
    """
    u0, u1 = a_box
    t0, t1 = i_box
    if not 0 <= u0 < u1 or not 0 <= t0 < t1 <= 2 * np.pi:
        raise ValidationError(f"bad box {a_box!r} x {i_box!r}")
    scale = n ** (4 / 3)

    def above(u):
        t = u / scale
        if t == 0:
            return float(n)
        return expected_large_gap_count(n, t).value if t < 2 * np.pi else 0.0

    return (above(u0) - above(u1)) * (t1 - t0) / (2 * np.pi)


@dataclass(frozen=True)
class NystromGrid:
    """Gauss-Legendre nodes and weights on a union of disjoint intervals."""

    intervals: tuple
    m: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, intervals, m):
        intervals = _normalize_intervals(intervals)
        x, w = leggauss(m)
        nodes, weights = [], []
        for a, b in intervals:
            nodes.append(a + (x + 1) * (b - a) / 2)
            weights.append(w * (b - a) / 2)
        if not nodes:
            return cls(intervals, m, np.empty(0), np.empty(0))
        return cls(intervals, m, np.concatenate(nodes), np.concatenate(weights))


def _normalize_intervals(intervals):
    arr = np.asarray(intervals, dtype=float)
    if arr.size == 0:
        return ()
    arr = arr.reshape(-1, 2)
    if np.any(arr[:, 1] < arr[:, 0]):
        raise ValidationError("intervals must satisfy a <= b")
    arr = arr[arr[:, 1] > arr[:, 0]]
    order = np.argsort(arr[:, 0])
    arr = arr[order]
    if np.any(arr[1:, 0] < arr[:-1, 1]):
        raise ValidationError("intervals overlap")
    return tuple(map(tuple, arr))


def _fredholm_at(h, grid):
    if grid.nodes.size == 0:
        return 1.0
    sw = np.sqrt(grid.weights)
    k = kernel_eval(h, grid.nodes[:, None], grid.nodes[None, :])
    k = 0.5 * (k + k.T)
    a = np.eye(grid.nodes.size) - sw[:, None] * k * sw[None, :]
    sign, logdet = np.linalg.slogdet(a)
    return float(sign * np.exp(logdet))


def fredholm_det(h, interval, m=16, tol=FREDHOLM_TOL, m_max=FREDHOLM_M_MAX):
    """``det(I - K_A)`` for a kernel handle and a union ``A`` of disjoint intervals.

    ``interval`` is ``(a, b)`` or a sequence of such pairs. The number of
    nodes per panel doubles from ``m`` until two successive values differ by
    less than ``tol``; :class:`ConvergenceError` if that needs more than
    ``m_max`` nodes.
    """
    if m < 4:
        raise ValidationError("quadrature order must be at least 4")
    intervals = _normalize_intervals(interval)
    if not intervals:
        return 1.0
    prev = _fredholm_at(h, NystromGrid.build(intervals, m))
    while m < m_max:
        m = min(2 * m, m_max)
        cur = _fredholm_at(h, NystromGrid.build(intervals, m))
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise ConvergenceError(f"Fredholm determinant not converged at {m_max} nodes per interval")


def spacing_density_p2(s, density=1.0, h=1e-3):
    """Nearest-neighbour spacing density of the sine process, ``d^2/ds^2 det(I - K_(0,s))``.

    Second centered difference with step ``h`` (reduced to ``s/4`` for small
    ``s``) and one Richardson halving. ``density`` is the mean point density;
    with density 1, ``p_2(s) ~ pi^2 s^2 / 3`` as s -> 0.
    """
    if not s > 0:
        raise ValidationError("spacing must be positive")
    kern = KernelHandle.sine(density)
    h = min(h, s / 4)

    def e(x):
        return fredholm_det(kern, (0.0, x), m=32, tol=1e-14)

    e0 = e(s)

    def second(step):
        return (e(s + step) - 2 * e0 + e(s - step)) / step**2

    return (4 * second(h / 2) - second(h)) / 3


def vacuum_prob_gue(n, interval, eps0=0.05):
    """Probability that GUE(n) has no eigenvalue in ``interval`` (normalized scale)."""
    intervals = _normalize_intervals(interval)
    for a, b in intervals:
        if a <= -2 + eps0 or b >= 2 - eps0:
            raise ValidationError(f"interval ({a}, {b}) leaves the bulk (-{2 - eps0}, {2 - eps0})")
    return fredholm_det(KernelHandle.gue(n), intervals)


def matched_cue_window(n, x, delta):
    """GUE interval ``[x, x + delta/rho_sc(x)]`` and CUE half-arc ``pi delta`` with equal mean counts."""
    return (x, x + delta / semicircle_density(x)), np.pi * delta


def negative_correlation_margin(h, i1, i2):
    """``P(A1 and A2 empty) - P(A1 empty) P(A2 empty)`` for disjoint intervals.

    ``h`` is a kernel handle or an integer n (taken as CUE(n)). Negative
    association of determinantal vacuum events makes this at most 0.
    """
    if not isinstance(h, KernelHandle):
        h = KernelHandle.cue(h)
    i1 = _normalize_intervals(i1)
    i2 = _normalize_intervals(i2)
    if not i1 or not i2:
        return 0.0
    both = _normalize_intervals(list(i1) + list(i2))
    return fredholm_det(h, both) - fredholm_det(h, i1) * fredholm_det(h, i2)
