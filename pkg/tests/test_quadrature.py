import math

import numpy as np
import pytest

from hmflab.quadrature import QuadratureError, integrate, integrate2d


@pytest.mark.parametrize("deg", [0, 1, 5, 19, 39])
def test_polynomials(deg):
    assert integrate(lambda x: x ** deg, 0.0, 2.0) == pytest.approx(2.0 ** (deg + 1) / (deg + 1), rel=1e-13)


def test_reversed_and_empty():
    assert integrate(np.sin, math.pi, 0.0) == pytest.approx(-2.0, abs=1e-13)
    assert integrate(np.sin, 1.0, 1.0) == 0.0


def test_discontinuity_with_breakpoint():
    f = lambda x: np.where(x < 0.3, 1.0, 0.0)
    assert integrate(f, 0.0, 1.0, 1e-12, points=(0.3,)) == pytest.approx(0.3, abs=1e-14)
    assert integrate(f, 0.0, 1.0, 1e-10) == pytest.approx(0.3, abs=1e-10)


def test_endpoint_singularity():
    assert integrate(np.sqrt, 0.0, 1.0, 1e-12) == pytest.approx(2 / 3, abs=1e-12)


def test_complex_integrand():
    val = integrate(lambda x: np.exp(1j * x), 0.0, math.pi)
    assert val == pytest.approx(2j, abs=1e-13)


def test_two_dimensional():
    val = integrate2d(lambda x, y: np.cos(x - y), (0.0, 1.0), (0.0, 1.0), 1e-12)
    assert val == pytest.approx(2 * (1 - math.cos(1.0)), abs=1e-12)


def test_budget_exhausted():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.sin(1.0 / np.maximum(x, 1e-300)), 0.0, 1.0, 1e-15, max_intervals=50)
