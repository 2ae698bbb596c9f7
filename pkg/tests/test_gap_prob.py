import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from extremegaps.ensembles import sample_cue_eigenangles, sample_gue_spectrum
from extremegaps.errors import ValidationError
from extremegaps.extreme_stats import circular_gaps
from extremegaps.gap_prob import (
    ToeplitzGapMatrix,
    dlog_gap_asymptotic,
    dlog_gap_probability_cue,
    expected_box_count_cue,
    expected_large_gap_count,
    fit_c0,
    fredholm_det,
    gap_probability_cue,
    log_gap_asymptotic,
    log_gap_probability_cue,
    matched_cue_window,
    negative_correlation_margin,
    spacing_density_p2,
    toeplitz_symbol_coeff,
    vacuum_prob_gue,
)
from extremegaps.kernels import KernelHandle
from extremegaps.rng import RngStream

# log 2 / 12 + 3 zeta'(-1), the constant of the arc determinant expansion
WIDOM_DYSON_C0 = -0.43850116846437


def test_symbol_coefficients():
    assert toeplitz_symbol_coeff(0.0, 0) == 1.0
    assert np.all(toeplitz_symbol_coeff(0.0, np.arange(1, 6)) == 0)
    alpha, m = 0.3, 5
    re = quad(lambda t: np.cos(m * t), alpha, 2 * np.pi - alpha, epsabs=1e-14)[0] / (2 * np.pi)
    assert toeplitz_symbol_coeff(alpha, m) == pytest.approx(re, abs=1e-12)
    ms = np.arange(1, 9)
    assert np.array_equal(toeplitz_symbol_coeff(0.7, ms), toeplitz_symbol_coeff(0.7, -ms))


def test_one_point_and_empty_arc():
    for a in (0.1, 1.0, 2.5):
        assert gap_probability_cue(1, a) == pytest.approx(1 - a / np.pi, abs=1e-14)
    assert gap_probability_cue(25, 0.0) == 1.0


def test_against_dense_toeplitz():
    for n, a in ((5, 0.4), (20, 0.2), (40, 0.05)):
        sign, logdet = np.linalg.slogdet(ToeplitzGapMatrix(n, a).to_dense())
        assert sign == 1
        assert log_gap_probability_cue(n, a) == pytest.approx(logdet, rel=1e-9, abs=1e-11)


def test_against_cue_fredholm():
    # Heine: D_n(alpha) is the Fredholm determinant of the CUE kernel on an arc of length 2 alpha
    for n, a in ((4, 0.9), (20, 0.3)):
        assert gap_probability_cue(n, a) == pytest.approx(fredholm_det(KernelHandle.cue(n), (0, 2 * a)), abs=1e-9)


def test_deep_tail_is_finite():
    v = log_gap_probability_cue(200, 1.0)
    assert np.isfinite(v) and v < -1000
    assert v == pytest.approx(log_gap_asymptotic(200, 1.0, WIDOM_DYSON_C0), abs=1e-3)


def test_monte_carlo_vacuum():
    n, trials = 30, 20000
    alpha = 2 * np.pi / n
    hits = np.array(
        [not np.any(sample_cue_eigenangles(n, RngStream(21, j), "cmv").angles < 2 * alpha) for j in range(trials)],
        dtype=float,
    )
    p = gap_probability_cue(n, alpha)
    se = math.sqrt(p * (1 - p) / trials)
    assert abs(hits.mean() - p) < 3 * se


def test_derivative_asymptotic():
    n = 100
    for na in (20, 40):
        a = na / n
        ex = dlog_gap_probability_cue(n, a)
        assert abs(ex / dlog_gap_asymptotic(n, a) - 1) < 0.01


def test_c0_fit_stable():
    fits = [fit_c0(n) for n in (50, 100, 200)]
    c = [f.c0 for f in fits]
    assert max(c) - min(c) < 1e-3
    assert c[-1] == pytest.approx(WIDOM_DYSON_C0, abs=1e-3)


def test_monotone():
    a = np.linspace(0.05, 3.0, 15)
    d = np.array([log_gap_probability_cue(12, x) for x in a])
    assert np.all(d < 0) and np.all(np.diff(d) < 0)
    dn = [log_gap_probability_cue(n, 0.3) for n in (2, 5, 10, 20)]
    assert np.all(np.diff(dn) < 0)


def test_large_gap_count_n2():
    for u in (0.3, 1.5, 4.0):
        assert expected_large_gap_count(2, u).value == pytest.approx((2 * np.pi - u + np.sin(u)) / np.pi, abs=1e-6)


def test_large_gap_count_monte_carlo():
    n, trials, u = 50, 4000, 2.0 * 2 * np.pi / 50
    counts = np.array(
        [np.count_nonzero(circular_gaps(sample_cue_eigenangles(n, RngStream(22, j), "cmv")).values > u) for j in range(trials)]
    )
    se = counts.std(ddof=1) / math.sqrt(trials)
    assert abs(counts.mean() - expected_large_gap_count(n, u).value) < 3 * se


def test_box_count_limit_and_monte_carlo():
    from extremegaps.extreme_stats import cue_intensity, cue_pattern

    # n=2: the whole circle, both gaps, every threshold
    u1 = 3.0 * 2 ** (4 / 3)
    assert expected_box_count_cue(2, (0, u1), (0, 2 * np.pi)) == pytest.approx(2 - expected_large_gap_count(2, 3.0).value)
    # tends to the limit intensity
    rel = [expected_box_count_cue(n, (0, 6), (0, np.pi)) / cue_intensity((0, 6), (0, np.pi)) - 1 for n in (100, 400)]
    assert rel[0] < rel[1] < 0
    # and matches simulation at finite n
    n, trials, box = 40, 6000, ((1.0, 8.0), (0.5, 4.0))
    counts = np.array([cue_pattern(sample_cue_eigenangles(n, RngStream(24, j), "cmv")).count(*box) for j in range(trials)])
    se = counts.std(ddof=1) / math.sqrt(trials)
    assert abs(counts.mean() - expected_box_count_cue(n, *box)) < 3 * se
    with pytest.raises(ValidationError):
        expected_box_count_cue(10, (3, 1), (0, 1))


def test_transition_trend():
    lam = 16
    exps = []
    for n in (100, 200, 400):
        r = expected_large_gap_count(n, math.sqrt(lam * math.log(n)) / n)
        exps.append(r.log_value / math.log(n))
    dev = np.abs(np.array(exps) - (1 - lam / 32))
    assert np.all(np.diff(dev) < 0)


def test_large_gap_count_underflow_flag():
    r = expected_large_gap_count(400, 1.5)
    assert r.underflow and r.value == 0.0 and np.isfinite(r.log_value)
    with pytest.raises(ValidationError):
        expected_large_gap_count(10, 7.0)


def test_fredholm_basics():
    sine = KernelHandle.sine()
    assert fredholm_det(sine, (0.3, 0.3)) == 1.0
    s = 0.1
    assert abs(fredholm_det(sine, (0, s)) - (1 - s / np.pi)) < 1e-4
    n = 400
    for sp in (0.5, 1.5, 3.0):
        d = gap_probability_cue(n, np.pi * sp / n) - fredholm_det(KernelHandle.sine(1.0), (0, sp))
        assert abs(d) < 1e-3


def test_fredholm_rejects_overlap():
    with pytest.raises(ValidationError):
        fredholm_det(KernelHandle.sine(), [(0, 1), (0.5, 2)])


def test_spacing_density():
    assert abs(spacing_density_p2(0.05) / 0.05**2 / (np.pi**2 / 3) - 1) < 0.02
    grid = np.linspace(0.1, 3.0, 8)
    assert all(spacing_density_p2(s) >= 0 for s in grid)
    # the large-s decay log p2 ~ -s^2/8 holds for the density-1/pi kernel
    assert abs(np.log(spacing_density_p2(6.0, density=1 / np.pi)) / (-36 / 8) - 1) < 0.2


def test_vacuum_gue():
    assert vacuum_prob_gue(20, []) == 1.0
    n = 100
    delta = math.sqrt(math.log(n)) / n
    window, arc = matched_cue_window(n, 0.0, delta)
    assert abs(vacuum_prob_gue(n, window) - gap_probability_cue(n, arc)) < 0.05
    with pytest.raises(ValidationError):
        vacuum_prob_gue(n, (1.9, 1.99))


def test_vacuum_gue_monte_carlo():
    n, trials = 50, 6000
    interval = (-0.1, 0.05)
    empty = np.array(
        [
            not np.any((s > interval[0]) & (s < interval[1]))
            for s in (sample_gue_spectrum(n, RngStream(23, j), "tridiagonal").values for j in range(trials))
        ],
        dtype=float,
    )
    p = vacuum_prob_gue(n, interval)
    se = math.sqrt(p * (1 - p) / trials)
    assert abs(empty.mean() - p) < 3 * se


def test_negative_correlation():
    assert negative_correlation_margin(20, (0, 0.2), []) == 0.0
    assert negative_correlation_margin(20, (0, 0.2), (1.0, 1.2)) <= 0
    assert abs(negative_correlation_margin(20, (0, 0.2), (np.pi, np.pi + 0.2))) < 1e-3
    assert negative_correlation_margin(KernelHandle.gue(30), (-0.3, -0.1), (0.0, 0.2)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 30), alpha=st.floats(0.01, 3.0))
def test_toeplitz_matches_dense(n, alpha):
    sign, logdet = np.linalg.slogdet(ToeplitzGapMatrix(n, alpha).to_dense())
    ours = log_gap_probability_cue(n, alpha)
    assert ours <= 0
    if logdet > -25:
        assert sign == 1
        assert ours == pytest.approx(logdet, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 60), a1=st.floats(0.01, 3.0), a2=st.floats(0.01, 3.0))
def test_gap_probability_monotone_in_alpha(n, a1, a2):
    lo, hi = sorted((a1, a2))
    assert log_gap_probability_cue(n, hi) <= log_gap_probability_cue(n, lo) + 1e-12
