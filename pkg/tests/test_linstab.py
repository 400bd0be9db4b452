import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from hmflab.core import ParticleState
from hmflab.equilibria import EquilibriumSpec, bicluster, build_equilibrium, quiet_start
from hmflab.linstab import (
    DegenerateFrequencyError,
    NonSymmetricMatrixError,
    build_stability_matrix,
    dense_symmetric_eigen,
    exact_growth_rate,
    gamma_bicluster,
    gamma_bicluster_largeN,
    gamma_quiet_start,
    sinc,
    toeplitz_cos_eigen,
)

SQRT_HALF = 0.7071067811865476


def test_matrix_quiet_start_n4():
    a = build_stability_matrix(quiet_start(4)).entries
    circ = np.array([[1, 0, -1, 0], [0, 1, 0, -1], [-1, 0, 1, 0], [0, -1, 0, 1]]) / 4
    np.testing.assert_allclose(a, circ, atol=1e-16)


def test_matrix_antipodal_pair():
    a = build_stability_matrix(ParticleState.cold([0.0, math.pi])).entries
    np.testing.assert_allclose(a, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-16)


@given(arrays(np.float64, st.integers(1, 64), elements=st.floats(-math.pi, math.pi)))
def test_matrix_symmetric_with_unit_trace(theta):
    a = build_stability_matrix(ParticleState.cold(theta)).entries
    assert np.array_equal(a, a.T)
    np.testing.assert_array_equal(np.diag(a), 1.0 / theta.size)
    assert np.trace(a) == pytest.approx(1.0, abs=1e-14)


def test_warm_state_warns():
    with pytest.warns(RuntimeWarning):
        build_stability_matrix(ParticleState(np.zeros(3), np.ones(3)))
    with pytest.warns(RuntimeWarning):
        exact_growth_rate(ParticleState(np.zeros(3), np.ones(3)))


@pytest.mark.parametrize("n", [3, 4, 10, 1000])
def test_quiet_start_rate(n):
    res = exact_growth_rate(quiet_start(n))
    assert res.lambda_sq == pytest.approx(0.5, abs=1e-12)
    assert res.eigenvalues[1] == pytest.approx(0.5, abs=1e-12)
    assert res.gamma == pytest.approx(gamma_quiet_start(), abs=1e-12)
    assert res.unstable


def test_quiet_start_constant():
    assert gamma_quiet_start() == SQRT_HALF


def test_antipodal_pair_rate():
    res = exact_growth_rate(ParticleState.cold([0.0, math.pi]))
    assert res.eigenvalues == pytest.approx((1.0, 0.0), abs=1e-15)
    assert res.gamma == pytest.approx(1.0, abs=1e-15)
    dense = dense_symmetric_eigen(build_stability_matrix(ParticleState.cold([0.0, math.pi])))
    np.testing.assert_allclose(dense, [1.0, 0.0], atol=1e-15)


def test_stable_reports_zero():
    from hmflab.linstab import GrowthRateResult

    r = GrowthRateResult(0.0, -0.1, "x")
    assert not r.unstable


def test_bicluster_rank2_matches_closed_form():
    res = exact_growth_rate(bicluster(1000, math.pi / 4))
    assert res.gamma == pytest.approx(gamma_bicluster(1000, math.pi / 4), abs=1e-12)


@pytest.mark.parametrize("n", [4, 6, 10, 100, 1000])
@pytest.mark.parametrize("d", [0.1, 0.5, 1.0, 1.5])
def test_bicluster_closed_form_vs_gram(n, d):
    assert exact_growth_rate(bicluster(n, d)).gamma == pytest.approx(gamma_bicluster(n, d), abs=1e-12)


def test_bicluster_examples():
    for n in (2, 4, 100, 1000):
        assert gamma_bicluster(n, math.pi / 2) == SQRT_HALF
    assert gamma_bicluster(4, math.pi / 4) == pytest.approx(0.9238795325112867, abs=1e-15)
    assert abs(gamma_bicluster(1000, math.pi / 4) - 0.904604823214972) < 1e-4
    assert gamma_bicluster_largeN(math.pi / 2) == pytest.approx(SQRT_HALF, abs=1e-15)
    assert gamma_bicluster_largeN(math.pi / 4) == pytest.approx(0.904604823214972, abs=1e-15)
    assert gamma_bicluster_largeN(1e-9) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("args", [(3, 0.5), (0, 0.5), (4, 0.0), (4, 1.6)])
def test_bicluster_rejects(args):
    with pytest.raises(ValueError):
        gamma_bicluster(*args)


def test_bicluster_large_n_via_dense():
    # independent check of the large-N value through the dense matrix at n = 2000
    n = 2000
    s = bicluster(n, math.pi / 4)
    c, sn = np.cos(s.theta), np.sin(s.theta)
    top = np.linalg.eigvalsh((np.outer(c, c) + np.outer(sn, sn)) / n)[-1]
    assert math.sqrt(top) == pytest.approx(gamma_bicluster_largeN(math.pi / 4), abs=1e-6)


def test_sinc():
    assert sinc(0.0) == 1.0
    assert sinc(math.pi) == pytest.approx(0.0, abs=1e-16)
    assert sinc(0.5) == pytest.approx(math.sin(0.5) / 0.5, rel=1e-15)


def test_dense_examples():
    np.testing.assert_allclose(dense_symmetric_eigen(np.eye(3)), [1, 1, 1], atol=1e-15)
    ev = dense_symmetric_eigen(build_stability_matrix(quiet_start(8)))
    np.testing.assert_allclose(ev, [0.5, 0.5] + [0.0] * 6, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_dense_invariants(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(6, 6))
    a = a + a.T
    ev = dense_symmetric_eigen(a)
    assert ev.sum() == pytest.approx(np.trace(a), abs=1e-10)
    assert np.sum(ev ** 2) == pytest.approx(np.sum(a * a), abs=1e-10)
    assert np.all(np.diff(ev) <= 0)
    np.testing.assert_allclose(ev, np.linalg.eigvalsh(a)[::-1], atol=1e-10)


def test_dense_rejects():
    with pytest.raises(NonSymmetricMatrixError):
        dense_symmetric_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NonSymmetricMatrixError):
        dense_symmetric_eigen(np.ones((2, 3)))
    with pytest.raises(ValueError):
        dense_symmetric_eigen(np.eye(2049))


def _cos_toeplitz(m, omega):
    k = np.arange(m)
    return np.cos((k[:, None] - k[None, :]) * omega)


def test_toeplitz_examples():
    assert toeplitz_cos_eigen(3, 2 * math.pi / 3) == pytest.approx((1.5, 1.5), abs=1e-14)
    np.testing.assert_allclose(dense_symmetric_eigen(_cos_toeplitz(3, 2 * math.pi / 3)), [1.5, 1.5, 0], atol=1e-12)
    assert toeplitz_cos_eigen(2, math.pi / 2) == pytest.approx((1.0, 1.0), abs=1e-15)
    assert toeplitz_cos_eigen(7, 1e-7) == pytest.approx((7.0, 0.0), abs=1e-10)
    with pytest.raises(DegenerateFrequencyError):
        toeplitz_cos_eigen(5, 0.0)
    with pytest.raises(DegenerateFrequencyError):
        toeplitz_cos_eigen(5, math.pi)


@settings(max_examples=30)
@given(st.floats(-math.pi, math.pi))
def test_rotation_invariance(phi):
    s = bicluster(50, 0.7)
    a = exact_growth_rate(s).gamma
    b = exact_growth_rate(s.with_theta(s.theta + phi)).gamma
    assert b == pytest.approx(a, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.integers(2, 40), elements=st.floats(-math.pi, math.pi)))
def test_spectrum_bounds(theta):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ev = dense_symmetric_eigen(build_stability_matrix(ParticleState.cold(theta)))
    nonzero = ev[np.abs(ev) > 1e-10]
    assert nonzero.size <= 2
    assert np.all((ev >= -1 - 1e-12) & (ev <= 1 + 1e-12))
    assert nonzero.sum() <= 1 + 1e-12


@pytest.mark.parametrize("spec", [
    EquilibriumSpec("random_uniform_bicluster", 256, delta_theta=1.1, seed=9),
    EquilibriumSpec("random_gaussian_bicluster", 128, sigma_theta=0.7, seed=9),
])
def test_rank2_vs_dense(spec):
    s = build_equilibrium(spec)
    top = dense_symmetric_eigen(build_stability_matrix(s))[0]
    assert exact_growth_rate(s).lambda_sq == pytest.approx(top, abs=1e-10)
