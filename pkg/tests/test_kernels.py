"""Numba and numpy flavours of every hot kernel must agree."""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from hmflab import kernels
from hmflab._jit import HAVE_NUMBA, backend_name

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def _state(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-math.pi, math.pi, n), rng.normal(0.0, 0.5, n)


@pytest.mark.parametrize("n", [1, 7, 1000])
def test_mean_field_agrees(n):
    theta, _ = _state(n, n)
    fa, fb = np.empty(n), np.empty(n)
    ma = kernels.mean_field_nb(theta, fa)
    mb = kernels.mean_field_np(theta, fb)
    assert ma == pytest.approx(mb, abs=1e-14)
    np.testing.assert_allclose(fa, fb, rtol=0, atol=1e-14)


@pytest.mark.parametrize("weights", [kernels.YOSHIDA4, kernels.LEAPFROG2])
def test_advance_agrees(weights):
    theta, p = _state(500, 3)
    out = []
    for advance, field in ((kernels.advance_nb, kernels.mean_field_nb), (kernels.advance_np, kernels.mean_field_np)):
        th, pp, f = theta.copy(), p.copy(), np.empty_like(theta)
        field(th, f)
        assert advance(th, pp, f, 0.05, 200, weights) == -1
        out.append((th, pp))
    np.testing.assert_allclose(out[0][0], out[1][0], rtol=0, atol=1e-10)
    np.testing.assert_allclose(out[0][1], out[1][1], rtol=0, atol=1e-10)


@pytest.mark.parametrize("advance", [kernels.advance_nb, kernels.advance_np])
def test_advance_flags_blowup(advance):
    th = np.array([0.0, 1.0])
    p = np.array([1e308, -1e308])
    f = np.zeros(2)
    assert advance(th, p, f, 10.0, 3, kernels.YOSHIDA4) == 0


def test_yoshida_weights_sum_to_one():
    assert kernels.YOSHIDA4.sum() == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5, 40])
def test_jacobi_agrees(n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n))
    a = a + a.T
    tol = 1e-12 * np.linalg.norm(a)
    da, sa = kernels.jacobi_nb(a.copy(), tol, 100)
    db, sb = kernels.jacobi_np(a.copy(), tol, 100)
    assert sa <= 100 and sb <= 100
    np.testing.assert_allclose(np.sort(da), np.sort(db), atol=1e-10)
    np.testing.assert_allclose(np.sort(da), np.linalg.eigvalsh(a), atol=1e-10)


@pytest.mark.parametrize("jacobi", [kernels.jacobi_nb, kernels.jacobi_np])
def test_jacobi_reports_nonconvergence(jacobi):
    rng = np.random.default_rng(0)
    a = rng.normal(size=(30, 30))
    a = a + a.T
    _, sweeps = jacobi(a, 1e-300, 1)
    assert sweeps == 2


def test_env_flag_selects_numpy():
    env = dict(os.environ, HMFLAB_NUMBA="0")
    code = "from hmflab import kernels; from hmflab._jit import backend_name; " \
           "print(backend_name(), kernels.advance is kernels.advance_np)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_default_backend_is_numba():
    if os.environ.get("HMFLAB_NUMBA", "1") not in ("0", "false", "no", "off"):
        assert backend_name() == "numba"
        assert kernels.advance is kernels.advance_nb
