"""Riemann zeta zero ordinates and their extreme normalized gaps.

Zero files are UTF-8 text with one decimal ordinate per line (the layout of
Odlyzko's public tables); lines starting with ``#`` and blank lines are
ignored. The first 10^5 ordinates ship with the package, see
:func:`bundled_zeros_path`.

With ``gamma_1 < gamma_2 < ...`` the normalized gaps are

    g_i = (gamma_{i+1} - gamma_i) / (2 pi) * log(gamma_i / (2 pi)),

which have mean 1. The GUE analogy predicts that the largest of n
consecutive ``g_i`` is about ``sqrt(32 log n) / (2 pi)`` and that the
smallest values of ``2 pi n^{1/3} g_i`` form a Poisson process with
intensity ``u^2 / (24 pi) du``.
"""
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ValidationError

BUNDLED_COUNT = 100_000


def bundled_zeros_path():
    """Path of the bundled table of the first 10^5 ordinates."""
    return Path(str(resources.files("extremegaps") / "data" / "zeros_1e5.txt"))


@dataclass(frozen=True)
class ZetaZeroSeries:
    """Strictly increasing zero ordinates plus where they came from."""

    ordinates: np.ndarray
    source: str = ""
    offset: int = 0

    def __post_init__(self):
        g = np.asarray(self.ordinates, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise ValidationError("a zero series needs at least one ordinate")
        if not g[0] > 1:
            raise ValidationError(f"first ordinate {g[0]} is not a plausible zero height")
        bad = np.nonzero(np.diff(g) <= 0)[0]
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"ordinates not strictly increasing at index {self.offset + i + 1}: {g[i]!r} -> {g[i + 1]!r}")
        object.__setattr__(self, "ordinates", g)

    @property
    def count(self):
        return self.ordinates.size

    def __len__(self):
        return self.ordinates.size

    def __getitem__(self, key):
        if not isinstance(key, slice) or key.step not in (None, 1):
            raise TypeError("zero series only support contiguous slices")
        start = range(self.count)[key].start if self.count else 0
        return ZetaZeroSeries(self.ordinates[key], self.source, self.offset + start)


def load_zeros(path, offset=0, count=None):
    """Read ordinates ``offset .. offset + count - 1`` (0-based) from a zero file.

    Raises :class:`ValidationError` with the line number on a malformed
    line, on non-increasing ordinates, or when fewer than ``count``
    ordinates follow ``offset``.
    """
    if offset < 0 or (count is not None and count < 1):
        raise ValidationError("offset must be >= 0 and count >= 1")
    values = []
    seen = 0
    prev = -np.inf
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            try:
                v = float(s)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: cannot parse {s!r} as an ordinate") from None
            if not np.isfinite(v):
                raise ValidationError(f"{path}:{lineno}: non-finite ordinate {s!r}")
            if v <= prev:
                raise ValidationError(f"{path}:{lineno}: ordinate {s} does not exceed the previous one")
            prev = v
            if seen >= offset:
                values.append(v)
                if count is not None and len(values) == count:
                    break
            seen += 1
    if not values:
        raise ValidationError(f"{path}: no ordinates at offset {offset}")
    if count is not None and len(values) < count:
        raise ValidationError(f"{path}: only {len(values)} ordinates after offset {offset}, {count} requested")
    return ZetaZeroSeries(np.array(values), str(path), offset)


def save_zeros(z, path, header=None):
    """Write a series in the format :func:`load_zeros` reads, with full precision."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in str(header).splitlines():
                fh.write(f"# {line}\n")
        for g in z.ordinates:
            fh.write(f"{float(g)!r}\n")


def normalized_gaps(z):
    """``(gamma_{i+1} - gamma_i) / (2 pi) * log(gamma_i / (2 pi))`` for consecutive ordinates."""
    g = getattr(z, "ordinates", z)
    g = np.asarray(g, dtype=float)
    if g.size < 2:
        raise ValidationError("need at least two ordinates")
    return np.diff(g) / (2 * np.pi) * np.log(g[:-1] / (2 * np.pi))


def predicted_max_gap(n):
    """``sqrt(32 log n) / (2 pi)``, the GUE prediction for the largest of n normalized gaps."""
    if n < 2:
        raise ValidationError("n must be at least 2")
    return np.sqrt(32 * np.log(n)) / (2 * np.pi)


@dataclass(frozen=True)
class MaxGapReport:
    observed: float
    predicted: float
    n: int
    index: int

    @property
    def relative_difference(self):
        return (self.observed - self.predicted) / self.predicted

    def as_dict(self):
        return {
            "n": self.n,
            "observed": self.observed,
            "predicted": self.predicted,
            "relative_difference": self.relative_difference,
            "argmax_index": self.index,
        }


def max_gap_report(z, n=None):
    """Largest of the first ``n`` normalized gaps against the prediction.

    ``n`` defaults to every gap in the series. ``index`` is the 1-based
    position ``i`` of the maximizing gap in the source file.
    """
    n = len(z) - 1 if n is None else int(n)
    if n < 2 or n > len(z) - 1:
        raise ValidationError(f"n={n} needs 2 <= n <= {len(z) - 1}")
    g = normalized_gaps(z.ordinates[: n + 1])
    i = int(np.argmax(g))
    return MaxGapReport(float(g[i]), float(predicted_max_gap(n)), n, z.offset + i + 1)


def small_gap_reference(u, bin_width):
    """Expected histogram height ``bin_width * u^2 / (24 pi)`` at ``u``."""
    return bin_width * np.asarray(u, dtype=float) ** 2 / (24 * np.pi)


@dataclass
class SmallGapHistogram:
    """Histogram of the ``count`` smallest values of ``2 pi n^{1/3} g_i``.

    ``edges`` start at 0 and stop at the first edge above the largest kept
    value, so the counts sum to ``count``. ``reference`` is the bin-width
    scaled intensity at the bin centers and ``expected`` its exact integral
    ``(u_1^3 - u_0^3) / (72 pi)`` over each bin.
    """

    n: int
    count: int
    bin_width: float
    values: np.ndarray
    edges: np.ndarray
    counts: np.ndarray
    centers: np.ndarray = field(init=False)
    reference: np.ndarray = field(init=False)
    expected: np.ndarray = field(init=False)

    def __post_init__(self):
        self.centers = 0.5 * (self.edges[:-1] + self.edges[1:])
        self.reference = small_gap_reference(self.centers, self.bin_width)
        self.expected = (self.edges[1:] ** 3 - self.edges[:-1] ** 3) / (72 * np.pi)

    @property
    def density(self):
        """Counts per unit length, to compare with ``u^2 / (24 pi)``."""
        return self.counts / self.bin_width

    def complete_bins(self):
        """Mask of bins lying entirely below the largest kept value."""
        return self.edges[1:] <= self.values[-1]

    def loglog_slope(self):
        """Least-squares slope of log(count) against log(center) over complete, nonempty bins."""
        keep = self.complete_bins() & (self.counts > 0)
        if keep.sum() < 3:
            raise ValidationError("fewer than three usable bins; widen the histogram or lower bin_width")
        return float(np.polyfit(np.log(self.centers[keep]), np.log(self.counts[keep]), 1)[0])

    def as_dict(self):
        return {
            "n": self.n,
            "count": self.count,
            "bin_width": self.bin_width,
            "edges": self.edges.tolist(),
            "counts": self.counts.tolist(),
            "reference": self.reference.tolist(),
            "expected": self.expected.tolist(),
        }


def small_gap_histogram(z, n=None, count=1000, bin_width=5.0):
    """Bin the ``count`` smallest of ``2 pi n^{1/3} g_i`` over the first ``n`` gaps."""
    n = len(z) - 1 if n is None else int(n)
    if n < 2 or n > len(z) - 1:
        raise ValidationError(f"n={n} needs 2 <= n <= {len(z) - 1}")
    if not 1 <= count <= n:
        raise ValidationError(f"count must lie in [1, {n}]")
    if not bin_width > 0:
        raise ValidationError("bin_width must be positive")
    g = normalized_gaps(z.ordinates[: n + 1])
    values = np.sort(2 * np.pi * np.cbrt(n) * g)[:count]
    nbins = int(np.floor(values[-1] / bin_width)) + 1
    edges = bin_width * np.arange(nbins + 1)
    counts, _ = np.histogram(values, bins=edges)
    return SmallGapHistogram(n, count, float(bin_width), values, edges, counts)
