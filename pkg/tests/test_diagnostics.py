import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hmflab.diagnostics import (
    BESSEL_SERIES_MAX,
    NoExponentialPhaseError,
    bessel_i,
    equilibrium_prediction_cold,
    fit_growth_rate,
    instantaneous_growth,
    plateau_growth,
    saturation_stats,
    timescale_report,
)
from hmflab.equilibria import PerturbationSpec, perturb, quiet_start
from hmflab.integrator import IntegratorConfig, evolve
from oracles import bessel_series_terms


def _saturating(t, gamma=0.5, m0=1e-6, cap=0.5):
    # exponential growth that rolls over to a plateau, like a real run
    e = m0 * np.exp(gamma * t)
    return e / (1.0 + e / cap)


def test_exact_exponential():
    t = np.linspace(0, 40, 801)
    m = 1e-6 * np.exp(0.5 * t)
    fit = fit_growth_rate((t, m))
    assert fit.gamma_fit == pytest.approx(0.5, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.window[0] < fit.window[1]
    assert m[t == fit.window[0]][0] >= 10 * m[0]
    assert m[t == fit.window[1]][0] <= m.max() / 10


def test_noisy_exponential():
    rng = np.random.default_rng(0)
    t = np.linspace(0, 40, 200)
    m = 1e-6 * np.exp(0.5 * t) * (1 + 0.01 * rng.normal(size=t.size))
    fit = fit_growth_rate((t, m))
    assert fit.gamma_fit == pytest.approx(0.5, abs=0.01)
    assert fit.stderr < 0.01


def test_saturating_curve_window_stays_linear():
    t = np.linspace(0, 60, 1201)
    fit = fit_growth_rate((t, _saturating(t)))
    assert fit.gamma_fit == pytest.approx(0.5, rel=0.01)
    assert fit.r_squared >= 0.999


@settings(max_examples=25)
@given(st.floats(1e-3, 1e3))
def test_scale_invariance(c):
    t = np.linspace(0, 60, 601)
    m = _saturating(t)
    a = fit_growth_rate((t, m))
    b = fit_growth_rate((t, c * m))
    assert b.gamma_fit == pytest.approx(a.gamma_fit, rel=1e-9)
    assert b.window == a.window


def test_explicit_window():
    t = np.linspace(0, 10, 101)
    m = np.exp(0.3 * t)
    fit = fit_growth_rate((t, m), window=(2.0, 8.0))
    assert fit.gamma_fit == pytest.approx(0.3, abs=1e-12)
    assert fit.samples == 61
    with pytest.raises(ValueError):
        fit_growth_rate((t, m), window=(5.0, 1.0))
    with pytest.raises(NoExponentialPhaseError):
        fit_growth_rate((t, m), window=(2.0, 2.5))
    with pytest.raises(ValueError):
        fit_growth_rate((t, -m), window=(2.0, 8.0))


@pytest.mark.parametrize("m", [np.full(100, 0.3), np.linspace(0.1, 0.2, 100)])
def test_no_exponential_phase(m):
    with pytest.raises(NoExponentialPhaseError):
        fit_growth_rate((np.linspace(0, 10, 100), m))


def test_quiet_start_fit():
    s = perturb(quiet_start(1000), PerturbationSpec(seed=1))
    tr = evolve(s, IntegratorConfig(t_end=40.0))
    assert fit_growth_rate(tr).gamma_fit == pytest.approx(1 / math.sqrt(2), rel=0.05)


def test_instantaneous_exponential_second_order():
    errs = []
    for n in (101, 201):
        t = np.linspace(0, 5, n)
        _, rate = instantaneous_growth((t, 2.0 * np.exp(0.7 * t)))
        errs.append(np.max(np.abs(rate[1:-1] - 0.7)))
    assert errs[0] < 1e-3
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_instantaneous_constant_and_errors():
    t = np.linspace(0, 1, 20)
    _, rate = instantaneous_growth((t, np.full(20, 0.4)))
    np.testing.assert_array_equal(rate, 0.0)
    with pytest.raises(ValueError):
        instantaneous_growth((t[:2], np.ones(2)))
    with pytest.raises(ValueError):
        instantaneous_growth((t, np.zeros(20)))


def test_plateau():
    t = np.linspace(0, 60, 1201)
    rate, fit = plateau_growth((t, _saturating(t, gamma=0.8)))
    assert rate == pytest.approx(0.8, rel=0.01)


def test_bessel_examples():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(1, 0.0) == 0.0
    assert bessel_i(0, 1.0) == pytest.approx(1.2660658777520082, rel=1e-15)
    assert bessel_i(0, 1.0) == pytest.approx(bessel_series_terms(0, 1.0), rel=1e-12)
    with pytest.raises(ValueError):
        bessel_i(0, -1.0)
    with pytest.raises(ValueError):
        bessel_i(2, 1.0)


@pytest.mark.parametrize("order", [0, 1])
def test_bessel_accuracy(order):
    from scipy.special import i0, i1

    ref = i0 if order == 0 else i1
    for x in np.linspace(0.01, 50, 400):
        assert bessel_i(order, x) == pytest.approx(float(ref(x)), rel=1e-12)


def test_bessel_ratio_below_one():
    for x in np.linspace(0.01, 50, 200):
        assert bessel_i(1, x) / bessel_i(0, x) < 1.0


@pytest.mark.parametrize("order", [0, 1])
def test_bessel_branches_agree_at_crossover(order):
    from hmflab.diagnostics import _bessel_asymptotic, _bessel_series

    lo = BESSEL_SERIES_MAX - 1.0
    for x in np.linspace(lo, lo + 2.0, 21):
        assert _bessel_asymptotic(order, x) == pytest.approx(_bessel_series(order, x), rel=1e-10)


def test_equilibrium_prediction():
    eq = equilibrium_prediction_cold()
    assert eq.m_eq == pytest.approx(0.62, abs=0.005)
    assert eq.t_eq == pytest.approx(0.39, abs=0.005)
    x = math.sqrt(eq.beta)
    assert bessel_i(1, x) / bessel_i(0, x) == pytest.approx(eq.m_eq, abs=1e-10)
    assert eq.m_eq == pytest.approx(math.sqrt(eq.t_eq), abs=1e-15)
    # frozen from scipy.optimize.brentq on scipy.special.i1 / i0
    assert eq.m_eq == pytest.approx(0.6217824809554131, abs=1e-11)


def test_timescale_examples():
    r = timescale_report(1 / math.sqrt(2), 0.62)
    assert r["omega_b"] == pytest.approx(0.787, abs=5e-4)
    assert r["ratio"] == pytest.approx(0.898, abs=5e-4)
    assert timescale_report(0.3, 1.0)["omega_b"] == 1.0
    assert timescale_report(0.0, 0.5)["ratio"] == 0.0
    for bad in ((0.5, 0.0), (0.5, 1.5), (-0.1, 0.5)):
        with pytest.raises(ValueError):
            timescale_report(*bad)


def test_saturation_examples():
    t = np.linspace(0, 200 * math.pi, 200_001)
    s = saturation_stats((t, np.full_like(t, 0.6)), 10.0)
    assert s["mean"] == pytest.approx(0.6, abs=1e-15)
    assert s["std"] == pytest.approx(0.0, abs=1e-15)
    s = saturation_stats((t, 0.6 + 0.05 * np.sin(t)), 0.0)
    assert s["mean"] == pytest.approx(0.6, abs=1e-5)
    assert s["std"] == pytest.approx(0.0354, abs=1e-4)
    with pytest.raises(ValueError):
        saturation_stats((t, t), t[-1] + 1)
