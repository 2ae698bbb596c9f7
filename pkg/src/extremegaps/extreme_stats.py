"""Gap extraction, normalizations and goodness-of-fit tests against the limit laws.

Smallest gaps live on the scale ``n^{-4/3}``. After normalization the
point process of (gap, location) pairs is Poisson with intensity
``u^2 du / (24 pi) x dtheta / (2 pi)`` for CUE and
``u^2 du / (48 pi^2) x (4 - x^2)^2 dx`` for GUE, and the k-th smallest
normalized gap has CDF ``P(Gamma(k, 1) <= x^3)``.

Largest gaps live on the scale ``sqrt(32 log n) / n`` (divided by
``inf_I sqrt(4 - x^2)`` for GUE).
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .errors import ValidationError

MIN_PATTERNS = 1000
MIN_LOCATIONS = 1000
MIN_KS_SAMPLES = 100


@dataclass(frozen=True)
class GapSample:
    """Spacings with their left endpoints.

    ``values`` and ``locations`` are parallel arrays; ``circular`` marks
    CUE gaps, whose last entry wraps from the largest angle to the smallest.
    """

    values: np.ndarray
    locations: np.ndarray
    circular: bool

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        loc = np.asarray(self.locations, dtype=float)
        if v.shape != loc.shape or v.ndim != 1:
            raise ValidationError("values and locations must be 1-d arrays of equal length")
        if np.any(v < 0):
            raise ValidationError("gaps must be nonnegative")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "locations", loc)

    def __len__(self):
        return self.values.size

    def smallest(self, k):
        """The k smallest gaps (ascending) and their locations."""
        order = np.argsort(self.values, kind="stable")[:k]
        return self.values[order], self.locations[order]


def circular_gaps(eigenangles):
    """All n gaps of a CUE draw, including the wrap-around gap ``2 pi - theta_n + theta_1``."""
    theta = getattr(eigenangles, "angles", eigenangles)
    theta = np.asarray(theta, dtype=float)
    if theta.size < 2:
        raise ValidationError("need at least two eigenangles")
    gaps = np.diff(theta, append=theta[0] + 2 * np.pi)
    return GapSample(gaps, theta, True)


def bulk_gaps(spectrum, interval):
    """Gaps ``lambda_{i+1} - lambda_i`` for every ``lambda_i`` in the closed interval (i < n)."""
    a, b = interval
    if not -2 < a < b < 2:
        raise ValidationError(f"interval must satisfy -2 < a < b < 2, got {interval!r}")
    lam = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    left = lam[:-1]
    keep = (left >= a) & (left <= b)
    return GapSample(np.diff(lam)[keep], left[keep], False)


def gue_location_integral(a, b):
    """``int_a^b (4 - x^2)^2 dx`` in closed form."""

    def prim(x):
        return 16 * x - 8 * x**3 / 3 + x**5 / 5

    return prim(b) - prim(a)


def normalize_smallest_cue(t, n):
    """``tau = n^{4/3} (72 pi)^{-1/3} t``."""
    return n ** (4 / 3) * (72 * np.pi) ** (-1 / 3) * np.asarray(t, dtype=float)


def normalize_smallest_gue(t, n, interval):
    """``tau = n^{4/3} (int_I (4 - x^2)^2 dx / (144 pi^2))^{1/3} t``."""
    a, b = interval
    c = (gue_location_integral(a, b) / (144 * np.pi**2)) ** (1 / 3)
    return n ** (4 / 3) * c * np.asarray(t, dtype=float)


def kth_smallest_limit_cdf(k, x):
    """Limit CDF of the k-th smallest normalized gap: ``P(Gamma(k, 1) <= x^3)``."""
    if int(k) != k or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    return special.gammainc(k, x**3)


def joint_smallest_probability(boxes):
    """Limit probability that the l-th smallest normalized gap lies in ``[x_l, y_l]`` for all l.

    ``boxes`` must interlace: ``0 <= x_1 < y_1 <= x_2 < y_2 <= ...``. Equals
    ``(e^{-x_k^3} - e^{-y_k^3}) prod_{l<k} (y_l^3 - x_l^3)``.
    """
    b = np.asarray(boxes, dtype=float).reshape(-1, 2)
    if b.size == 0:
        raise ValidationError("need at least one box")
    flat = b.ravel()
    if flat[0] < 0 or np.any(np.diff(flat) < 0) or np.any(b[:, 1] < b[:, 0]):
        raise ValidationError("boxes must interlace: 0 <= x_1 <= y_1 <= x_2 <= ...")
    x, y = b[:, 0], b[:, 1]
    head = np.prod(y[:-1] ** 3 - x[:-1] ** 3)
    return float(head * (np.exp(-x[-1] ** 3) - np.exp(-y[-1] ** 3)))


def cue_intensity(a_box, i_box):
    """Mean number of normalized CUE (gap, location) points in ``A x I``.

    ``A = (u0, u1)`` in units of ``n^{4/3} t``; ``I`` a sub-interval of [0, 2 pi).
    """
    u0, u1 = a_box
    t0, t1 = i_box
    return (u1**3 - u0**3) / (72 * np.pi) * (t1 - t0) / (2 * np.pi)


def gue_intensity(a_box, i_box):
    """Mean number of normalized GUE (gap, location) points in ``A x I``.

    ``A = (u0, u1)`` in units of ``n^{4/3} t``; ``I`` inside (-2, 2).
    """
    u0, u1 = a_box
    return (u1**3 - u0**3) / (144 * np.pi**2) * gue_location_integral(*i_box)


@dataclass(frozen=True)
class MarkedPointPattern:
    """One realization of the normalized (gap, location) point process."""

    gaps: np.ndarray
    locations: np.ndarray

    def count(self, a_box, i_box):
        u0, u1 = a_box
        t0, t1 = i_box
        inside = (self.gaps > u0) & (self.gaps <= u1) & (self.locations >= t0) & (self.locations < t1)
        return int(np.count_nonzero(inside))


def cue_pattern(eigenangles, u_max=np.inf):
    """Normalized CUE pattern: gaps ``n^{4/3} t`` at their left endpoints (gaps above ``u_max`` dropped)."""
    g = circular_gaps(eigenangles)
    n = len(g)
    u = n ** (4 / 3) * g.values
    keep = u <= u_max
    return MarkedPointPattern(u[keep], g.locations[keep])


def gue_pattern(spectrum, eps0=0.05, u_max=np.inf):
    """Normalized GUE pattern over the bulk ``|lambda_i| < 2 - eps0``."""
    lam = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    n = lam.size
    left = lam[:-1]
    keep = np.abs(left) < 2 - eps0
    u = n ** (4 / 3) * np.diff(lam)[keep]
    sel = u <= u_max
    return MarkedPointPattern(u[sel], left[keep][sel])


@dataclass
class MomentCheck:
    """Empirical statistic against a reference value, with its standard error."""

    name: str
    empirical: float
    reference: float
    stderr: float

    @property
    def z(self):
        if self.stderr == 0:
            return 0.0 if self.empirical == self.reference else np.inf
        return (self.empirical - self.reference) / self.stderr

    @property
    def within_3sigma(self):
        return bool(abs(self.z) <= 3)

    def as_dict(self):
        return {
            "name": self.name,
            "empirical": self.empirical,
            "reference": self.reference,
            "stderr": self.stderr,
            "z": self.z,
            "pass": self.within_3sigma,
        }


def _mean_check(name, values, reference):
    values = np.asarray(values, dtype=float)
    se = float(values.std(ddof=1) / np.sqrt(values.size))
    return MomentCheck(name, float(values.mean()), float(reference), se)


@dataclass
class PoissonBoxReport:
    """Poisson diagnostics of counts in one box (and optionally a second, disjoint box)."""

    mu: float
    trials: int
    checks: list = field(default_factory=list)
    chi2_pvalue: float = np.nan

    @property
    def passed(self):
        return all(c.within_3sigma for c in self.checks)

    def as_dict(self):
        return {
            "mu": self.mu,
            "trials": self.trials,
            "chi2_pvalue": self.chi2_pvalue,
            "checks": [c.as_dict() for c in self.checks],
            "pass": self.passed,
        }


def _poisson_chi2(counts, mu):
    """Chi-square p-value of a count histogram against Poisson(mu), tail bins pooled to >= 5 expected."""
    n = counts.size
    if mu <= 0:
        return 1.0 if np.all(counts == 0) else 0.0
    kmax = int(counts.max()) + 1
    probs = stats.poisson.pmf(np.arange(kmax), mu)
    probs = np.append(probs, 1 - probs.sum())
    obs = np.bincount(counts, minlength=kmax + 1).astype(float)
    # pool from the right until every bin expects at least 5
    exp_counts = probs * n
    bins_o, bins_e = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(obs[::-1], exp_counts[::-1]):
        acc_o += o
        acc_e += e
        if acc_e >= 5:
            bins_o.append(acc_o)
            bins_e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0:
        if bins_e:
            bins_o[-1] += acc_o
            bins_e[-1] += acc_e
        else:
            bins_o.append(acc_o)
            bins_e.append(acc_e)
    if len(bins_e) < 2:
        return 1.0
    chi2 = np.sum((np.array(bins_o) - np.array(bins_e)) ** 2 / np.array(bins_e))
    return float(stats.chi2.sf(chi2, len(bins_e) - 1))


def poisson_box_test(patterns, a_box, i_box, intensity, second_box=None):
    """Compare counts of normalized points in ``A x I`` with Poisson(mu).

    ``intensity`` is :func:`cue_intensity`, :func:`gue_intensity` or any
    callable of ``(A, I)`` returning the limiting mean. Reports the mean,
    factorial moments for k = 1..3 against ``mu^k``, a chi-square p-value
    of the count histogram and, when ``second_box = (A2, I2)`` is given,
    the covariance of the two counts against 0.
    """
    if len(patterns) < MIN_PATTERNS:
        raise ValidationError(f"need at least {MIN_PATTERNS} patterns, got {len(patterns)}")
    mu = float(intensity(a_box, i_box))
    counts = np.array([p.count(a_box, i_box) for p in patterns])
    report = PoissonBoxReport(mu, counts.size)
    report.checks.append(_mean_check("mean", counts, mu))
    c = counts.astype(float)
    falling = c.copy()
    for k in (2, 3):
        falling = falling * (c - (k - 1))
        report.checks.append(_mean_check(f"factorial_moment_{k}", falling, mu**k))
    report.chi2_pvalue = _poisson_chi2(counts, mu)
    if second_box is not None:
        counts2 = np.array([p.count(*second_box) for p in patterns])
        cross = (counts - counts.mean()) * (counts2 - counts2.mean())
        report.checks.append(_mean_check("covariance", cross, 0.0))
    return report


def ks_statistic(samples, cdf):
    """Kolmogorov-Smirnov sup-distance between the empirical CDF of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size < MIN_KS_SAMPLES:
        raise ValidationError(f"need at least {MIN_KS_SAMPLES} samples, got {x.size}")
    f = cdf(x)
    i = np.arange(1, x.size + 1)
    return float(max(np.max(i / x.size - f), np.max(f - (i - 1) / x.size)))


def ks_critical_value(n, level=0.05):
    """Asymptotic KS critical value ``c(level) / sqrt(n)``."""
    return float(stats.kstwobign.isf(level) / np.sqrt(n))


def largest_gap_statistic(gaps, ell, n, ensemble="cue", interval=None):
    """The ell-th largest gap times ``n / sqrt(32 log n)``.

    For GUE the result is further multiplied by ``inf_I sqrt(4 - x^2)``.
    """
    values = np.asarray(getattr(gaps, "values", gaps), dtype=float)
    if int(ell) != ell or not 1 <= ell <= values.size:
        raise ValidationError(f"ell must be in 1..{values.size}, got {ell!r}")
    gap = np.partition(values, values.size - ell)[values.size - ell]
    stat = gap * n / np.sqrt(32 * np.log(n))
    if ensemble == "gue":
        if interval is None:
            raise ValidationError("GUE statistic needs the interval I")
        a, b = interval
        stat *= np.sqrt(4 - max(a * a, b * b))
    elif ensemble != "cue":
        raise ValidationError(f"unknown ensemble {ensemble!r}")
    return float(stat)


@dataclass
class LocationReport:
    """Chi-square comparison of smallest-gap locations with ``(4 - x^2)^2`` on I."""

    chi2: float
    dof: int
    pvalue: float
    count: int
    mean: MomentCheck
    half_ratio: MomentCheck

    def as_dict(self):
        return {
            "chi2": self.chi2,
            "dof": self.dof,
            "pvalue": self.pvalue,
            "count": self.count,
            "mean": self.mean.as_dict(),
            "half_ratio": self.half_ratio.as_dict(),
        }


def location_density_test(locations, interval, bins=10):
    """Test smallest-gap locations against the density proportional to ``(4 - x^2)^2`` on I."""
    x = np.asarray(locations, dtype=float)
    if x.size < MIN_LOCATIONS:
        raise ValidationError(f"need at least {MIN_LOCATIONS} locations, got {x.size}")
    a, b = interval
    edges = np.linspace(a, b, bins + 1)
    obs, _ = np.histogram(x, edges)
    total = gue_location_integral(a, b)
    expected = x.size * gue_location_integral(edges[:-1], edges[1:]) / total
    chi2 = float(np.sum((obs - expected) ** 2 / expected))
    pvalue = float(stats.chi2.sf(chi2, bins - 1))
    # reference mean of the density on I
    def prim1(t):
        return 8 * t**2 - 2 * t**4 + t**6 / 6

    ref_mean = (prim1(b) - prim1(a)) / total
    mean = _mean_check("mean_location", x, ref_mean)
    # fraction in the left half of I versus its closed-form share
    mid = 0.5 * (a + b)
    share = gue_location_integral(a, mid) / total
    half = _mean_check("left_half_fraction", (x < mid).astype(float), share)
    return LocationReport(chi2, bins - 1, pvalue, int(x.size), mean, half)
