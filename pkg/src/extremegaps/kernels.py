"""Determinantal kernels of the sine process, CUE(n) and GUE(n).

All kernels are the real symmetric forms used for gap probabilities:

* sine, density ``d``: ``sin(pi d (x - y)) / (pi (x - y))``. The default
  ``d = 1/pi`` gives ``sin(x - y) / (pi (x - y))``.
* CUE(n) on angles: ``sin(n t / 2) / (2 pi sin(t / 2))`` with ``t = x - y``.
* GUE(n) in the normalized scale (semicircle on (-2, 2)): the
  Christoffel-Darboux form ``sqrt(n) (psi_n(X) psi_{n-1}(Y) - psi_{n-1}(X)
  psi_n(Y)) / (x - y)`` with ``X = sqrt(n) x``, so that ``K(x, x)``
  integrates to ``n``.

Hermite functions are evaluated by the orthonormal three-term recurrence
with a running exponent, so nothing overflows or underflows before the
final product, even for indices in the tens of thousands.
"""
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .ensembles import semicircle_density
from .errors import NumericalError, ValidationError

# pairs closer than this fraction of the local mean spacing use the diagonal form
NEAR_DIAGONAL = 1e-6
# relative size below which a negative correlation determinant is round-off
NEGATIVE_SLACK = 1e-10

_LOG_PSI0 = -0.25 * np.log(2 * np.pi)
_RESCALE = 1e150


def _hermite_tail(n, x):
    """psi_n, psi_{n-1}, psi_{n-2} at ``x`` (psi_{-1} = psi_{-2} = 0)."""
    x = np.asarray(x, dtype=float)
    p2 = np.zeros_like(x)
    p1 = np.zeros_like(x)
    p0 = np.ones_like(x)
    logscale = -x**2 / 4 + _LOG_PSI0
    for k in range(n):
        p2, p1, p0 = p1, p0, (x * p0 - np.sqrt(k) * p1) / np.sqrt(k + 1)
        big = np.abs(p0) > _RESCALE
        if big.any():
            s = np.where(big, 1.0 / _RESCALE, 1.0)
            p0, p1, p2 = p0 * s, p1 * s, p2 * s
            logscale = logscale - np.log(s)
    scale = np.exp(logscale)
    with np.errstate(invalid="ignore"):
        out = [np.where(scale == 0.0, 0.0, p * scale) for p in (p0, p1, p2)]
    return tuple(out)


def psi(k, x):
    """Orthonormal Hermite function psi_k(x), weight e^{-x^2/2}.

    ``psi_0(x) = e^{-x^2/4} / (2 pi)^{1/4}`` and
    ``psi_{k+1} = (x psi_k - sqrt(k) psi_{k-1}) / sqrt(k+1)``.
    Values too small to represent return 0.
    """
    if int(k) != k or k < 0:
        raise ValidationError(f"index must be a nonnegative integer, got {k!r}")
    return _hermite_tail(int(k), x)[0]


def psi_prime(k, x):
    """Derivative of psi_k from ``psi_k' = -x/2 psi_k + sqrt(k) psi_{k-1}``."""
    if int(k) != k or k < 0:
        raise ValidationError(f"index must be a nonnegative integer, got {k!r}")
    k = int(k)
    pk, pk1, _ = _hermite_tail(k, x)
    return -0.5 * np.asarray(x, dtype=float) * pk + np.sqrt(k) * pk1


@dataclass(frozen=True)
class KernelHandle:
    """One of the sine, CUE(n) or GUE(n) kernels.

    ``density`` only applies to the sine kernel. ``diagnostics`` counts
    correlation determinants whose tiny negative round-off was clamped to 0.
    """

    kind: str
    n: int | None = None
    density: float = 1.0 / np.pi
    diagnostics: Counter = field(default_factory=Counter, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("sine", "cue", "gue"):
            raise ValidationError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "sine":
            if self.n is not None:
                raise ValidationError("the sine kernel takes no dimension")
            if not self.density > 0:
                raise ValidationError("density must be positive")
        elif self.n is None or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"{self.kind} kernel needs a positive integer n, got {self.n!r}")

    @classmethod
    def sine(cls, density=1.0 / np.pi):
        return cls("sine", None, density)

    @classmethod
    def cue(cls, n):
        return cls("cue", int(n))

    @classmethod
    def gue(cls, n):
        return cls("gue", int(n))

    def __call__(self, x, y):
        return kernel_eval(self, x, y)

    def diagonal(self, x):
        """K(x, x), the one-point density."""
        x = np.asarray(x, dtype=float)
        if self.kind == "sine":
            return np.full(x.shape, float(self.density))
        if self.kind == "cue":
            return np.full(x.shape, self.n / (2 * np.pi))
        return _gue_diagonal(self.n, x)


def _sine(d, x, y):
    return d * np.sinc(d * (x - y))


def _cue(n, x, y):
    t = np.asarray(x - y, dtype=float)
    # distance to the nearest zero of sin(t/2)
    r = np.abs(t - 2 * np.pi * np.round(t / (2 * np.pi)))
    near = r < NEAR_DIAGONAL / n
    with np.errstate(invalid="ignore", divide="ignore"):
        regular = np.sin(n * t / 2) / (2 * np.pi * np.sin(t / 2))
    limit = n * np.cos(n * t / 2) / (2 * np.pi * np.cos(t / 2))
    return np.where(near, limit, regular)


def _gue_diagonal(n, x):
    pn, pn1, pn2 = _hermite_tail(n, np.sqrt(n) * x)
    return n * (np.sqrt(n) * pn1**2 - np.sqrt(n - 1) * pn * pn2)


def _gue(n, x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    flat = np.concatenate([x.ravel(), y.ravel()])
    uniq, inv = np.unique(flat, return_inverse=True)
    pn, pn1, _ = _hermite_tail(n, np.sqrt(n) * uniq)
    ix, iy = inv[: x.size].reshape(x.shape), inv[x.size :].reshape(y.shape)
    num = pn[ix] * pn1[iy] - pn1[ix] * pn[iy]
    mid = 0.5 * (x + y)
    spacing = 1.0 / (n * np.maximum(semicircle_density(mid), 1.0 / n))
    near = np.abs(x - y) < NEAR_DIAGONAL * spacing
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.array(np.sqrt(n) * num / (x - y), dtype=float, ndmin=1).reshape(x.shape)
    if near.any():
        # K(x, y) = K(m, m) + O((x - y)^2) around the midpoint m
        out[near] = _gue_diagonal(n, mid[near])
    return out


def kernel_eval(h, x, y):
    """Kernel value K(x, y), broadcasting over ``x`` and ``y``.

    Coincident or nearly coincident arguments use the analytic diagonal
    limit, so the result is always finite. Symmetric in its arguments.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if h.kind == "sine":
        out = _sine(h.density, x, y)
    elif h.kind == "cue":
        out = _cue(h.n, x, y)
    else:
        out = _gue(h.n, x, y)
    return out[()] if np.ndim(out) == 0 else out


def kernel_matrix(h, points):
    """The matrix ``K(p_i, p_j)``."""
    p = np.asarray(points, dtype=float).ravel()
    m = kernel_eval(h, p[:, None], p[None, :])
    # enforce exact symmetry against round-off in the difference quotient
    return 0.5 * (m + m.T)


def correlation_det(h, points):
    """k-point correlation ``det(K(p_i, p_j))``.

    Returns 0 when k exceeds the rank n of a finite-n kernel or two points
    coincide. Tiny negative
    round-off is clamped to 0 and counted in ``h.diagnostics['clamped']``;
    anything more negative than ``1e-10`` times the product of the diagonal
    entries raises :class:`NumericalError`.
    """
    p = np.asarray(points, dtype=float).ravel()
    if p.size < 1:
        raise ValidationError("need at least one point")
    if h.n is not None and p.size > h.n:
        return 0.0
    if np.unique(p).size < p.size:
        # two equal rows
        return 0.0
    m = kernel_matrix(h, p)
    det = float(np.linalg.det(m))
    if det < 0:
        scale = float(np.prod(np.abs(np.diag(m))))
        if det < -NEGATIVE_SLACK * scale:
            raise NumericalError(f"correlation determinant {det:.3e} is negative beyond round-off")
        h.diagnostics["clamped"] += 1
        det = 0.0
    return det


def rho2_near_diagonal_gue(n, x, u, eps0=0.05):
    """Two-point correlation of GUE(n) at (x, x + u) and its small-u leading term.

    Returns ``(exact, leading)`` where ``leading = n^4 (4 - x^2)^2 u^2 / (48 pi^2)``.
    """
    if abs(x) >= 2 - eps0 or abs(x + u) >= 2 - eps0:
        raise ValidationError(f"points must lie in the bulk |x| < {2 - eps0}")
    h = KernelHandle.gue(n)
    exact = correlation_det(h, [x, x + u])
    leading = n**4 * (4 - x**2) ** 2 * u**2 / (48 * np.pi**2)
    return exact, leading
