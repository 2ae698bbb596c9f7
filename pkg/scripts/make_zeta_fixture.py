"""Regenerate the bundled table of the first zeta zero ordinates.

Zeros below ``--mp-below`` come from ``mpmath.zetazero``; above that the
Riemann-Siegel formula with the C0, C1, C2 correction terms is evaluated
in numpy, sign changes are located on a fine grid and refined with
Brent's method; local minima of |Z| between grid points of equal sign are
searched for close pairs the grid steps over. The zero count is checked
against the smooth Riemann-von Mangoldt term: ``k - 3/2 - theta(gamma_k)/pi`` averages to 0
over every block of 1000 zeros unless a pair was missed.

    python scripts/make_zeta_fixture.py 100000 src/extremegaps/data/zeros_1e5.txt

Takes a few minutes on one core.
"""
import argparse
import sys

import mpmath
import numpy as np
from scipy.optimize import brentq, minimize_scalar

# Taylor coefficients of Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) at p = 1/2
_TAYLOR_ORDER = 48


def _psi_taylor():
    mpmath.mp.dps = 60

    def psi(p):
        return mpmath.cos(2 * mpmath.pi * (p * p - p - mpmath.mpf(1) / 16)) / mpmath.cos(2 * mpmath.pi * p)

    c = mpmath.taylor(psi, mpmath.mpf(1) / 2, _TAYLOR_ORDER)
    return np.array([float(v) for v in c])


_C = _psi_taylor()
_D2 = np.polynomial.polynomial.polyder(_C, 2)
_D3 = np.polynomial.polynomial.polyder(_C, 3)
_D6 = np.polynomial.polynomial.polyder(_C, 6)


def theta(t):
    t = np.asarray(t, dtype=float)
    return t / 2 * np.log(t / (2 * np.pi)) - t / 2 - np.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3)


def siegel_z(t):
    """Riemann-Siegel Z(t) for t of a few hundred and above, vectorized."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    a = np.sqrt(t / (2 * np.pi))
    big_n = np.floor(a).astype(int)
    p = a - big_n
    th = theta(t)
    out = np.zeros_like(t)
    k = np.arange(1, big_n.max() + 1)
    for lo in range(0, t.size, 4096):
        sl = slice(lo, lo + 4096)
        terms = np.cos(th[sl, None] - t[sl, None] * np.log(k)[None, :]) / np.sqrt(k)[None, :]
        terms[k[None, :] > big_n[sl, None]] = 0.0
        out[sl] = 2 * terms.sum(axis=1)
    x = p - 0.5
    pv = np.polynomial.polynomial.polyval
    c0 = pv(x, _C)
    c1 = -pv(x, _D3) / (96 * np.pi**2)
    c2 = pv(x, _D2) / (64 * np.pi**2) + pv(x, _D6) / (18432 * np.pi**4)
    sign = np.where(big_n % 2 == 1, 1.0, -1.0)
    out += sign * a**-0.5 * (c0 + c1 / a + c2 / a**2)
    return out


def _scalar_z(t):
    return float(siegel_z(t)[0])


def _hidden_pair(a, b, sign):
    """Two zeros in (a, b) when Z dips through zero between grid points of equal sign, else []."""
    res = minimize_scalar(lambda t: sign * _scalar_z(t), bounds=(a, b), method="bounded", options={"xatol": 1e-13})
    if res.fun >= 0:
        return []
    m = res.x
    return [brentq(_scalar_z, a, m, xtol=1e-12, rtol=1e-15), brentq(_scalar_z, m, b, xtol=1e-12, rtol=1e-15)]


def riemann_siegel_zeros(t_start, count, per_spacing=24):
    """The first ``count`` zeros above ``t_start`` (t_start must not be a zero).

    Sign changes on the grid give single zeros. A close pair between two
    grid points leaves no sign change, so every local minimum of ``|Z|``
    on the grid without a sign change is searched for a dip through zero.
    """
    zeros = []
    t = t_start
    while len(zeros) < count:
        spacing = 2 * np.pi / np.log(t / (2 * np.pi))
        # one extra point on each side so dips at the chunk ends are seen
        grid = t + np.arange(-1, 4098) * spacing / per_spacing
        lo, hi = grid[1], grid[-2]
        z = siegel_z(grid)
        sg = np.sign(z)
        found = []
        for i in np.nonzero(sg[:-1] * sg[1:] < 0)[0]:
            found.append(brentq(_scalar_z, grid[i], grid[i + 1], xtol=1e-12, rtol=1e-15))
        az = np.abs(z)
        dips = np.nonzero((az[1:-1] < az[:-2]) & (az[1:-1] <= az[2:]) & (sg[:-2] == sg[1:-1]) & (sg[1:-1] == sg[2:]))[0] + 1
        for i in dips:
            found.extend(_hidden_pair(grid[i - 1], grid[i + 1], sg[i]))
        zeros.extend(sorted(x for x in set(found) if lo <= x < hi))
        t = hi
    return np.array(zeros[:count])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("count", type=int)
    ap.add_argument("path")
    ap.add_argument("--mp-below", type=int, default=500, help="zeros computed by mpmath")
    args = ap.parse_args(argv)
    head = min(args.mp_below, args.count)
    low = np.array([float(mpmath.zetazero(k).imag) for k in range(1, head + 1)])
    # restart midway between the last two mpmath zeros
    tail = args.count - head
    if tail:
        start = 0.5 * (low[-1] + low[-2])
        high = riemann_siegel_zeros(start, tail + 1)
        if abs(high[0] - low[-1]) > 5e-8:
            sys.exit(f"Riemann-Siegel and mpmath disagree at the seam: {high[0]} vs {low[-1]}")
        zeros = np.concatenate([low, high[1:]])
    else:
        zeros = low
    if np.any(np.diff(zeros) <= 0):
        sys.exit("zeros are not strictly increasing")
    k = np.arange(1, zeros.size + 1)
    s = k - 1.5 - theta(zeros) / np.pi
    blocks = s[: s.size // 1000 * 1000].reshape(-1, 1000).mean(axis=1)
    if np.any(np.abs(blocks) > 0.25):
        sys.exit(f"zero count check failed, block means {blocks[np.abs(blocks) > 0.25]}")
    with open(args.path, "w", encoding="utf-8") as fh:
        fh.write(f"# imaginary parts of the first {zeros.size} nontrivial zeros of zeta\n")
        fh.write(f"# first {head} from mpmath.zetazero, the rest by Riemann-Siegel (C0..C2), accurate to a few 1e-8\n")
        for g in zeros:
            fh.write(f"{g:.9f}\n")


if __name__ == "__main__":
    main()
