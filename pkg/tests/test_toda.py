import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremegaps.ensembles import TridiagonalMatrix, eig_sym_tridiagonal, sample_gue_tridiagonal
from extremegaps.errors import ConvergenceError, ValidationError
from extremegaps.rng import RngStream
from extremegaps.toda import (
    fit_exponent,
    integrate_toda,
    moser_velocities,
    predicted_convergence_time,
    scaling_experiment,
    toda_rhs,
)


def dense_commutator(t):
    m = t.to_dense()
    s = np.diag(t.b, 1) - np.diag(t.b, -1)
    return s @ m - m @ s


def test_rhs_is_commutator():
    t = sample_gue_tridiagonal(7, RngStream(1))
    da, db = toda_rhs(t)
    c = dense_commutator(t)
    assert np.allclose(da, np.diag(c), atol=1e-14)
    assert np.allclose(db, np.diag(c, 1), atol=1e-14)
    # the flow stays tridiagonal
    assert np.allclose(np.triu(c, 2), 0, atol=1e-14)


def test_trivial_starts():
    r = integrate_toda(TridiagonalMatrix(np.array([0.7]), np.empty(0)), 1e-6)
    assert r.t_conv == 0.0
    t = TridiagonalMatrix(np.array([3.0, 1.0, -2.0]), np.array([1e-9, 0.0]))
    r = integrate_toda(t, 1e-6)
    assert r.t_conv == 0.0 and r.diagnostics["steps"] == 0
    with pytest.raises(ValidationError):
        integrate_toda(t, 0.0)


def test_n2_decay_rate():
    t0 = TridiagonalMatrix(np.array([0.3, -0.4]), np.array([0.8]))
    ev = eig_sym_tridiagonal(t0).values
    t1 = integrate_toda(t0, 1e-6).t_conv
    t2 = integrate_toda(t0, 1e-10).t_conv
    rate = np.log(1e4) / (t2 - t1)
    assert rate == pytest.approx(ev[1] - ev[0], rel=1e-6)


def test_converges_to_sorted_spectrum():
    t0 = sample_gue_tridiagonal(16, RngStream(2))
    r = integrate_toda(t0, 1e-8)
    ev = eig_sym_tridiagonal(t0).values
    a = r.state.T.a
    assert np.all(np.diff(a) < 0)
    assert np.allclose(a[::-1], ev, atol=1e-6)
    assert np.max(np.abs(r.state.T.b)) < 1e-8
    assert r.diagnostics["max_drift"] < 1e-8
    assert r.diagnostics["trace_drift"] < 1e-12
    assert r.diagnostics["bmax_monotone"]


def test_n2_closed_form():
    # x = a_1 - a_2 = d tanh(d t + phi0), b = (d / 2) sech(d t + phi0), d the eigenvalue gap
    t0 = TridiagonalMatrix(np.array([-0.2, 0.5]), np.array([0.3]))
    d = np.sqrt(0.7**2 + 4 * 0.3**2)
    phi0 = np.arctanh(-0.7 / d)
    for eps in (1e-3, 1e-9):
        exact = (np.arccosh(d / (2 * eps)) - phi0) / d
        assert integrate_toda(t0, eps, atol=1e-6 * eps).t_conv == pytest.approx(exact, rel=1e-7)
        # the default atol of 1e-3 eps resolves b near eps to about 0.1 percent
        assert integrate_toda(t0, eps).t_conv == pytest.approx(exact, abs=1e-3 / d)


def test_prediction_asymptotics_n2():
    t0 = TridiagonalMatrix(np.array([0.3, -0.4]), np.array([0.8]))
    v = moser_velocities(eig_sym_tridiagonal(t0))
    ratios = [integrate_toda(t0, eps).t_conv / predicted_convergence_time(v, eps) for eps in (1e-4, 1e-12)]
    # the scattering offset is O(1), so the ratio tends to 1
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1)
    assert abs(ratios[1] - 1) < 0.05


def test_prediction_arithmetic():
    assert predicted_convergence_time([0.0, 1.0, 3.0], np.exp(-2)) == pytest.approx(4.0)
    assert np.array_equal(moser_velocities(np.array([1.0, -1.0, 0.5])), [-2.0, -1.0, 2.0])
    with pytest.raises(ValidationError):
        predicted_convergence_time([0.0, 1.0], 1.5)
    with pytest.raises(ValidationError):
        predicted_convergence_time([1.0, 1.0], 1e-3)


def test_step_cap():
    with pytest.raises(ConvergenceError):
        integrate_toda(sample_gue_tridiagonal(10, RngStream(3)), 1e-8, max_steps=5)


def test_fit_exponent_recovers_power_law():
    gen = RngStream(4).generator()
    sizes = [32, 64, 128, 256]
    samples = [n**-1.5 * gen.lognormal(0, 0.1, 200) for n in sizes]
    fit = fit_exponent(sizes, samples, bootstrap=300)
    assert fit.slope == pytest.approx(-1.5, abs=0.03)
    assert fit.ci_low <= fit.slope <= fit.ci_high
    with pytest.raises(ValidationError):
        fit_exponent([10], [np.ones(3)])


def test_scaling_conventions_share_draws():
    norm = scaling_experiment([8, 16], 6, seed=5, integrate=False)
    raw = scaling_experiment([8, 16], 6, seed=5, convention="unnormalized", integrate=False)
    for n in (8, 16):
        assert raw.per_size[n]["median_min_gap"] == pytest.approx(np.sqrt(n) * norm.per_size[n]["median_min_gap"])
    assert norm.t_conv is None


def test_scaling_with_integration_and_sampler():
    res = scaling_experiment([6, 12], 4, eps=1e-5, seed=6)
    assert res.max_drift < 1e-8
    assert set(res.per_size[6]) == {"median_min_gap", "median_t_conv"}

    def diagonal_sampler(n, gen):
        return TridiagonalMatrix(np.sort(gen.normal(size=n))[::-1].copy(), np.full(n - 1, 1e-3))

    res = scaling_experiment([6, 12], 3, eps=1e-5, sampler=diagonal_sampler)
    assert res.per_size[6]["median_t_conv"] > 0
    with pytest.raises(ValidationError):
        scaling_experiment([6], 3)
    with pytest.raises(ValidationError):
        scaling_experiment([6, 8], 3, convention="scaled")


@settings(max_examples=15, deadline=None)
@given(n=st.integers(2, 10), seed=st.integers(0, 2**32))
def test_flow_preserves_spectrum(n, seed):
    t0 = sample_gue_tridiagonal(n, RngStream(seed))
    r = integrate_toda(t0, 1e-7)
    ev = eig_sym_tridiagonal(t0).values
    assert np.allclose(eig_sym_tridiagonal(r.state.T).values, ev, atol=1e-8)
    assert abs(np.sum(r.state.T.a) - np.sum(t0.a)) < 1e-12
