"""Compiled inner loops: implicit-shift QL and the CMV phase root finder."""
import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True)
def tql_eigenvalues(d, e, max_sweeps):
    """Eigenvalues of a real symmetric tridiagonal matrix by implicit-shift QL.

    ``d`` (length n) is overwritten with the unsorted eigenvalues, ``e`` holds
    the n-1 off-diagonal entries. Returns -1 on success, otherwise the index
    of the eigenvalue that exceeded ``max_sweeps`` iterations.
    """
    n = d.shape[0]
    if n == 1:
        return -1
    ee = np.zeros(n)
    ee[: n - 1] = e
    eps = np.finfo(np.float64).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(ee[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_sweeps:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * ee[l])
            r = math.sqrt(g * g + 1.0)
            g = d[m] - d[l] + ee[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * ee[i]
                b = c * ee[i]
                r = math.sqrt(f * f + g * g)
                ee[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    ee[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            ee[l] = g
            ee[m] = 0.0
    return -1


@njit(cache=True, fastmath=True)
def _rotate_and_wind(cr, ci, wr, wi, inv, wind, j):
    """Rotate c_j by conj(w)/w and update its winding count; returns the rotation."""
    rr = (wr * wr - wi * wi) * inv
    ri = -2.0 * wr * wi * inv
    ncr = cr[j] * rr - ci[j] * ri
    nci = cr[j] * ri + ci[j] * rr
    # a rotation by less than pi crosses the branch cut iff Im changes sign
    # and the chord meets the negative real axis
    cross = cr[j] * nci - ncr * ci[j]
    flip = (ci[j] >= 0.0) != (nci >= 0.0)
    neg = cross * (nci - ci[j]) < 0.0
    wind[j] += (flip and neg) * (1.0 if cross > 0.0 else -1.0)
    cr[j] = ncr
    ci[j] = nci
    return rr, ri


@njit(cache=True, fastmath=True)
def cmv_phase(theta, ar, ai, split, target, f, df):
    """Split Pruefer phase whose level crossings are the CMV eigenangles.

    ``ar + 1j*ai`` holds alpha_0..alpha_{n-2}. The forward part is the
    lifted phase of z*Phi_m/Phi*_m built from alpha_0..alpha_{m-1}; the
    backward part pulls the boundary condition ``target`` back through
    alpha_{n-2}..alpha_m. Their difference increases strictly with theta,
    winds n times, and is a multiple of 2 pi exactly at the eigenangles.
    Splitting in the middle keeps the large trailing coefficients from
    turning the phase into a staircase, so Newton converges in a few steps.

    Evaluates all angles in ``theta`` at once (the inner loop runs over
    angles, which hides the latency of the recursion) and writes the phase
    and its theta-derivative into ``f`` and ``df``. Per-step arguments are
    accumulated as unit rotations with an explicit winding count, so no
    inverse trigonometric calls are needed inside the loop.
    """
    nt = theta.shape[0]
    nb = ar.shape[0] - split
    zr = np.cos(theta)
    zi = np.sin(theta)
    br = zr.copy()
    bi = zi.copy()
    cr = np.ones(nt)
    ci = np.zeros(nt)
    wind = np.zeros(nt)
    d = np.ones(nt)
    for k in range(split):
        a_r = ar[k]
        a_i = ai[k]
        for j in range(nt):
            vr = a_r * br[j] - a_i * bi[j]
            vi = a_r * bi[j] + a_i * br[j]
            wr = 1.0 - vr
            wi = -vi
            inv = 1.0 / (wr * wr + wi * wi)
            d[j] = 1.0 + d[j] * (1.0 + 2.0 * (vr * wr + vi * wi) * inv)
            rr, ri = _rotate_and_wind(cr, ci, wr, wi, inv, wind, j)
            tr = br[j] * rr - bi[j] * ri
            ti = br[j] * ri + bi[j] * rr
            br[j] = zr[j] * tr - zi[j] * ti
            bi[j] = zr[j] * ti + zi[j] * tr
    for j in range(nt):
        f[j] = (split + 1) * theta[j] + TWO_PI * wind[j] + math.atan2(ci[j], cr[j])
        df[j] = d[j]

    er = np.full(nt, math.cos(target))
    ei = np.full(nt, math.sin(target))
    cr[:] = 1.0
    ci[:] = 0.0
    wind[:] = 0.0
    d[:] = 0.0
    for k in range(ar.shape[0] - 1, split - 1, -1):
        a_r = -ar[k]
        a_i = -ai[k]
        for j in range(nt):
            tr = er[j] * zr[j] + ei[j] * zi[j]
            ti = ei[j] * zr[j] - er[j] * zi[j]
            vr = a_r * tr - a_i * ti
            vi = a_r * ti + a_i * tr
            wr = 1.0 - vr
            wi = -vi
            inv = 1.0 / (wr * wr + wi * wi)
            d[j] = (1.0 + 2.0 * (vr * wr + vi * wi) * inv) * (d[j] - 1.0)
            rr, ri = _rotate_and_wind(cr, ci, wr, wi, inv, wind, j)
            er[j] = tr * rr - ti * ri
            ei[j] = tr * ri + ti * rr
    for j in range(nt):
        f[j] -= target - nb * theta[j] + TWO_PI * wind[j] + math.atan2(ci[j], cr[j])
        df[j] -= d[j]


@njit(cache=True)
def cmv_eigenangles(ar, ai, target, grid_factor):
    """Solve phase(theta) = 0 (mod 2 pi) for the n eigenangles in [0, 2 pi).

    Grid bracketing followed by safeguarded Newton, run for all roots at
    once. The phase is strictly increasing, so every root is tied to its own
    level and bracket, and arbitrarily close pairs are resolved.
    """
    n = ar.shape[0] + 1
    split = (n - 1) // 2
    m_grid = grid_factor * n
    grid = TWO_PI * np.arange(m_grid + 1) / m_grid
    fg = np.empty(m_grid + 1)
    dfg = np.empty(m_grid + 1)
    cmv_phase(grid, ar, ai, split, target, fg, dfg)
    j0 = math.ceil(fg[0] / TWO_PI)
    ftol = 64.0 * 2.220446049250313e-16 * TWO_PI * n
    xtol = 4.0 * 2.220446049250313e-16 * TWO_PI

    x = np.empty(n)
    lo = np.empty(n)
    hi = np.empty(n)
    level = np.empty(n)
    g = 0
    for m in range(n):
        level[m] = TWO_PI * (j0 + m)
        while g < m_grid - 1 and fg[g + 1] < level[m]:
            g += 1
        lo[m] = grid[g]
        hi[m] = grid[g + 1]
        flo = fg[g] - level[m]
        fhi = fg[g + 1] - level[m]
        if fhi > flo:
            x[m] = lo[m] - flo * (hi[m] - lo[m]) / (fhi - flo)
        else:
            x[m] = 0.5 * (lo[m] + hi[m])

    active = np.arange(n)
    f = np.empty(n)
    df = np.empty(n)
    for _ in range(100):
        na = active.shape[0]
        if na == 0:
            break
        xa = x[active]
        cmv_phase(xa, ar, ai, split, target, f[:na], df[:na])
        keep = np.empty(na, dtype=np.int64)
        nk = 0
        for i in range(na):
            m = active[i]
            fm = f[i] - level[m]
            if abs(fm) <= ftol:
                continue
            if fm < 0.0:
                lo[m] = x[m]
            else:
                hi[m] = x[m]
            xn = x[m] - fm / df[i]
            if not (lo[m] < xn < hi[m]):
                xn = 0.5 * (lo[m] + hi[m])
            done = abs(xn - x[m]) <= xtol
            x[m] = xn
            if not done:
                keep[nk] = m
                nk += 1
        active = keep[:nk]
    return x


# Dormand-Prince 5(4) coefficients
_DP_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
        [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
        [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ]
)
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = _DP_B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

TODA_OK = 0
TODA_MAX_STEPS = 1
TODA_UNDERFLOW = 2
TODA_DRIFT = 3


@njit(cache=True)
def toda_rhs_packed(y, n, out):
    """Toda vector field on y = (a_1..a_n, b_1..b_{n-1})."""
    for k in range(n):
        out[k] = 0.0
    for k in range(n - 1):
        b = y[n + k]
        b2 = 2.0 * b * b
        out[k] += b2
        out[k + 1] -= b2
        out[n + k] = b * (y[k + 1] - y[k])


@njit(cache=True)
def _dp_step(y, h, ks, n, ynew, err, tmp):
    m = y.shape[0]
    for i in range(1, 7):
        for j in range(m):
            s = 0.0
            for l in range(i):
                s += _DP_A[i, l] * ks[l, j]
            tmp[j] = y[j] + h * s
        toda_rhs_packed(tmp, n, ks[i])
    for j in range(m):
        s = 0.0
        e = 0.0
        for l in range(7):
            s += _DP_B[l] * ks[l, j]
            e += _DP_E[l] * ks[l, j]
        ynew[j] = y[j] + h * s
        err[j] = h * e


@njit(cache=True)
def _descending(y, n):
    for k in range(n - 1):
        if y[k + 1] >= y[k]:
            return False
    return True


@njit(cache=True)
def _bmax(y, n):
    m = 0.0
    for k in range(n - 1):
        v = abs(y[n + k])
        if v > m:
            m = v
    return m


@njit(cache=True)
def _drift(y, n, reference, max_sweeps):
    d = y[:n].copy()
    status = tql_eigenvalues(d, y[n:].copy(), max_sweeps)
    if status >= 0:
        return np.inf
    d.sort()
    return np.max(np.abs(d - reference))


@njit(cache=True)
def toda_integrate(y, eps, rtol, atol, max_steps, check_every, reference, drift_abort, max_sweeps):
    """Dormand-Prince 5(4) with PI control until max |b_k| < eps.

    ``y`` is overwritten with the final state. Returns
    (t, status, steps, rejected, max_drift, bmax_monotone); the first
    crossing inside the last step is found by bisecting the step size.
    """
    n = (y.shape[0] + 1) // 2
    m = y.shape[0]
    ks = np.empty((7, m))
    ynew = np.empty(m)
    err = np.empty(m)
    tmp = np.empty(m)
    ymid = np.empty(m)
    toda_rhs_packed(y, n, ks[0])
    t = 0.0
    steps = 0
    rejected = 0
    max_drift = 0.0
    monotone = True
    kmax = 0.0
    ymax = 0.0
    for j in range(m):
        kmax = max(kmax, abs(ks[0, j]))
        ymax = max(ymax, abs(y[j]))
    h = 0.01 * ymax / kmax if kmax > 0 else 1.0
    err_prev = 1.0
    while True:
        if steps >= max_steps:
            return t, TODA_MAX_STEPS, steps, rejected, max_drift, monotone
        _dp_step(y, h, ks, n, ynew, err, tmp)
        e = 0.0
        for j in range(m):
            sc = atol + rtol * max(abs(y[j]), abs(ynew[j]))
            e += (err[j] / sc) ** 2
        e = math.sqrt(e / m)
        if not math.isfinite(e):
            h *= 0.1
            rejected += 1
            continue
        if e <= 1.0:
            if _bmax(ynew, n) < eps:
                lo = 0.0
                hi = h
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    _dp_step(y, mid, ks, n, ymid, err, tmp)
                    if _bmax(ymid, n) < eps:
                        hi = mid
                    else:
                        lo = mid
                    if hi - lo <= 1e-12 * max(t, 1.0):
                        break
                _dp_step(y, hi, ks, n, ynew, err, tmp)
                y[:] = ynew
                t += hi
                steps += 1
                break
            # once a is decreasing every |b_k| decays, so max |b_k| must too
            if _descending(y, n) and _descending(ynew, n) and _bmax(ynew, n) > _bmax(y, n):
                monotone = False
            y[:] = ynew
            t += h
            steps += 1
            # FSAL: the last stage is the derivative at the new point
            ks[0, :] = ks[6, :]
            if steps % check_every == 0:
                dr = _drift(y, n, reference, max_sweeps)
                max_drift = max(max_drift, dr)
                if dr > drift_abort:
                    return t, TODA_DRIFT, steps, rejected, max_drift, monotone
            fac = 0.9 * max(e, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            h *= min(5.0, max(0.2, fac))
            err_prev = max(e, 1e-4)
        else:
            h *= max(0.2, 0.9 * e ** (-0.2))
            rejected += 1
        if h < 1e-14 * max(t, 1.0):
            return t, TODA_UNDERFLOW, steps, rejected, max_drift, monotone
    dr = _drift(y, n, reference, max_sweeps)
    max_drift = max(max_drift, dr)
    status = TODA_DRIFT if dr > drift_abort else TODA_OK
    return t, status, steps, rejected, max_drift, monotone
