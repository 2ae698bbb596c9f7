"""Reproducible CUE and GUE samplers and the eigensolvers behind them.

Scaling conventions
-------------------
GUE spectra follow the joint density proportional to
``exp(-n * sum(l_i**2) / 2) * prod |l_i - l_j|**2``, so the empirical
spectral measure approaches the semicircle on (-2, 2). The matching matrix
model has ``Var(H_ii) = 1/n`` and ``E|H_ij|**2 = 1/n`` (real and imaginary
parts each of variance ``1/(2n)``).

The unnormalized convention with unit-size entries (used when discussing the
Toda flow) is obtained by multiplying eigenvalues by ``sqrt(n)``; see
:func:`to_unnormalized`.
"""
from dataclasses import dataclass, field

import numpy as np

from ._numerics import cmv_eigenangles, tql_eigenvalues
from .errors import ConvergenceError, NumericalError, UnitarityError, ValidationError
from .rng import as_generator

MAX_QL_SWEEPS = 50
UNITARITY_TOL = 1e-6


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Real symmetric tridiagonal matrix with diagonal ``a`` and off-diagonal ``b``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 1 or a.size < 1:
            raise ValidationError("diagonal must be a non-empty vector")
        if b.shape != (a.size - 1,):
            raise ValidationError(f"off-diagonal must have length {a.size - 1}, got {b.shape}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self):
        return self.a.size

    def to_dense(self):
        return np.diag(self.a) + np.diag(self.b, 1) + np.diag(self.b, -1)

    def norm(self):
        """Frobenius norm (a cheap upper bound on the spectral radius)."""
        return float(np.sqrt(np.sum(self.a**2) + 2 * np.sum(self.b**2)))


def _check_strictly_increasing(values, what, seed):
    if values.size > 1 and not np.all(np.diff(values) > 0):
        i = int(np.argmin(np.diff(values)))
        raise NumericalError(
            f"{what}: tied or unsorted values at index {i} ({values[i]!r}, {values[i + 1]!r}); seed={seed}"
        )


@dataclass(frozen=True)
class Spectrum:
    """Sorted real eigenvalues of one GUE draw (or one Toda state)."""

    values: np.ndarray
    seed: int | None = None
    trial_id: int | None = None
    ensemble: str = "gue"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValidationError("spectrum must be a non-empty vector")
        _check_strictly_increasing(v, "spectrum", self.seed)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.size


@dataclass(frozen=True)
class EigenangleSet:
    """Sorted eigenangles in [0, 2 pi) of one CUE draw."""

    angles: np.ndarray
    seed: int | None = None
    trial_id: int | None = None
    method: str = field(default="dense", compare=False)

    def __post_init__(self):
        v = np.asarray(self.angles, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValidationError("eigenangle set must be a non-empty vector")
        if v[0] < 0 or v[-1] >= 2 * np.pi:
            raise ValidationError("eigenangles must lie in [0, 2 pi)")
        _check_strictly_increasing(v, "eigenangles", self.seed)
        object.__setattr__(self, "angles", v)

    @property
    def n(self):
        return self.angles.size


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValidationError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def sample_gue_dense(n, rng):
    """Dense GUE matrix whose eigenvalues have the normalized GUE law.

    Built as ``(G + G^H) / sqrt(2n)`` from a complex Ginibre matrix ``G`` with
    ``E|G_ij|^2 = 1``; Hermitian symmetry and real diagonal are exact.
    """
    n = _check_n(n)
    gen, _, _ = as_generator(rng)
    g = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2.0)
    return (g + g.conj().T) / np.sqrt(2.0 * n)


def sample_gue_tridiagonal(n, rng):
    """Tridiagonal beta=2 model with the same eigenvalue law as :func:`sample_gue_dense`.

    Diagonal ``N(0, 1/n)``; off-diagonal ``b_k = chi_{2(n-k)} / sqrt(2n)``,
    k = 1..n-1.
    """
    n = _check_n(n)
    gen, _, _ = as_generator(rng)
    a = gen.standard_normal(n) / np.sqrt(n)
    dof = 2.0 * np.arange(n - 1, 0, -1)
    b = np.sqrt(gen.chisquare(dof) / (2.0 * n)) if n > 1 else np.empty(0)
    return TridiagonalMatrix(a, b)


def householder_tridiagonalize(h):
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Successive Householder reflections give a complex tridiagonal matrix; a
    diagonal unitary similarity then rotates the off-diagonal entries onto
    the nonnegative reals.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValidationError("matrix must be square")
    for k in range(n - 2):
        x = a[k + 1 :, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * xnorm
        v /= np.linalg.norm(v)
        sub = a[k + 1 :, k + 1 :]
        p = 2.0 * (sub @ v)
        beta = np.vdot(v, p).real / 2.0
        q = p - 2.0 * beta * v
        sub -= np.outer(v, q.conj()) + np.outer(q, v.conj())
        a[k + 1 :, k] = 0.0
        a[k, k + 1 :] = 0.0
        a[k + 1, k] = -phase * xnorm
        a[k, k + 1] = np.conj(a[k + 1, k])
    diag = a.diagonal().real.copy()
    off = np.abs(a.diagonal(-1))
    return TridiagonalMatrix(diag, off)


def eig_sym_tridiagonal(t, seed=None):
    """All eigenvalues of a symmetric tridiagonal matrix, sorted ascending."""
    d = t.a.copy()
    status = tql_eigenvalues(d, t.b.copy(), MAX_QL_SWEEPS)
    if status >= 0:
        raise ConvergenceError(
            f"implicit QL exceeded {MAX_QL_SWEEPS} sweeps at eigenvalue {status} (n={t.n}, seed={seed})"
        )
    return Spectrum(np.sort(d), seed=seed)


def sample_gue_spectrum(n, rng, method="dense"):
    """Sorted eigenvalues of a normalized GUE draw.

    ``method='dense'`` diagonalizes a full Hermitian matrix (the reference
    path); ``method='tridiagonal'`` samples the beta=2 tridiagonal model in
    O(n) and diagonalizes it in O(n^2).
    """
    n = _check_n(n)
    gen, seed, trial = as_generator(rng)
    if method == "dense":
        h = sample_gue_dense(n, gen)
        values = np.linalg.eigvalsh(h)
    elif method == "tridiagonal":
        t = sample_gue_tridiagonal(n, gen)
        values = eig_sym_tridiagonal(t, seed=seed).values
    else:
        raise ValidationError(f"unknown GUE sampling method {method!r}")
    return Spectrum(values, seed=seed, trial_id=trial)


def haar_unitary(n, rng):
    """Haar unitary from the QR factorization of a complex Ginibre matrix.

    The phases of diag(R) are pushed back into Q so the law is exactly Haar.
    """
    n = _check_n(n)
    gen, _, _ = as_generator(rng)
    z = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = r.diagonal()
    return q * (d / np.abs(d))


def sample_verblunsky(n, rng):
    """Verblunsky coefficients of the CMV model of CUE(n).

    alpha_k, k < n-1, is rotation invariant with ``|alpha_k|^2 ~ Beta(1, n-k-1)``;
    alpha_{n-1} is uniform on the unit circle.
    """
    n = _check_n(n)
    gen, _, _ = as_generator(rng)
    k = np.arange(n - 1)
    radius = np.sqrt(gen.beta(1.0, n - k - 1.0)) if n > 1 else np.empty(0)
    phases = gen.uniform(0.0, 2 * np.pi, size=n)
    alpha = radius * np.exp(1j * phases[: n - 1])
    return alpha, np.exp(1j * phases[n - 1])


def cmv_angles(alpha, last, grid_factor=1):
    """Eigenangles of the CMV matrix with Verblunsky coefficients ``alpha`` and unimodular ``last``."""
    target = -float(np.angle(last))
    alpha = np.asarray(alpha, dtype=np.complex128)
    roots = cmv_eigenangles(np.ascontiguousarray(alpha.real), np.ascontiguousarray(alpha.imag), target, grid_factor)
    return np.mod(roots, 2 * np.pi)


def sample_cue_eigenangles(n, rng, method="dense"):
    """Sorted eigenangles of a Haar unitary matrix.

    ``method='dense'`` orthonormalizes a Ginibre matrix and diagonalizes it,
    checking that every eigenvalue sits on the unit circle. ``method='cmv'``
    draws independent Verblunsky coefficients and solves for the zeros of the
    paraorthogonal polynomial; it is O(n^2) and validated against the dense
    path in the test suite.
    """
    n = _check_n(n)
    gen, seed, trial = as_generator(rng)
    if method == "dense":
        u = haar_unitary(n, gen)
        ev = np.linalg.eigvals(u)
        drift = float(np.max(np.abs(np.abs(ev) - 1.0)))
        if drift > UNITARITY_TOL:
            raise UnitarityError(f"eigenvalue modulus off by {drift:.3e} (n={n}, seed={seed})")
        angles = np.mod(np.angle(ev), 2 * np.pi)
    elif method == "cmv":
        alpha, last = sample_verblunsky(n, gen)
        angles = cmv_angles(alpha, last)
    else:
        raise ValidationError(f"unknown CUE sampling method {method!r}")
    angles = np.sort(angles)
    # angle() can return exactly 2*pi after the mod for values just below the cut
    angles[angles >= 2 * np.pi] -= 2 * np.pi
    return EigenangleSet(np.sort(angles), seed=seed, trial_id=trial, method=method)


def to_unnormalized(spectrum):
    """Rescale a normalized GUE spectrum to unit-size entries (multiply by sqrt(n))."""
    return Spectrum(spectrum.values * np.sqrt(spectrum.n), spectrum.seed, spectrum.trial_id, "gue-unnormalized")


def semicircle_cdf(x):
    """CDF of the semicircle law on (-2, 2)."""
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + (x * np.sqrt(4 - x**2) / 2 + 2 * np.arcsin(x / 2)) / (2 * np.pi)


def semicircle_density(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.clip(4 - x**2, 0.0, None)) / (2 * np.pi)
