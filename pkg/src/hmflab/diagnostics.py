"""Growth-rate extraction from trajectories and violent-relaxation numbers."""
from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "NoExponentialPhaseError",
    "GrowthFit",
    "EquilibriumPrediction",
    "fit_growth_rate",
    "instantaneous_growth",
    "plateau_growth",
    "bessel_i",
    "equilibrium_prediction_cold",
    "timescale_report",
    "saturation_stats",
]

FLOOR_FACTOR = 10.0
CEILING_FACTOR = 10.0
MIN_R_SQUARED = 0.999
MIN_SAMPLES = 10

# above this the asymptotic expansion reaches full double precision
BESSEL_SERIES_MAX = 20.0


class NoExponentialPhaseError(ValueError):
    """No window of the trajectory qualifies as exponential growth."""


@dataclass(frozen=True)
class GrowthFit:
    gamma_fit: float
    stderr: float
    window: tuple
    r_squared: float
    samples: int


def _columns(trajectory):
    if hasattr(trajectory, "t"):
        return np.asarray(trajectory.t, dtype=float), np.asarray(trajectory.m, dtype=float)
    t, m = trajectory
    return np.asarray(t, dtype=float), np.asarray(m, dtype=float)


def _linfit(t, y):
    n = t.size
    tm = t.mean()
    ym = y.mean()
    sxx = np.sum((t - tm) ** 2)
    sxy = np.sum((t - tm) * (y - ym))
    syy = np.sum((y - ym) ** 2)
    slope = sxy / sxx
    resid = y - (ym + slope * (t - tm))
    ssr = float(np.dot(resid, resid))
    r2 = 1.0 - ssr / syy if syy > 0 else 1.0
    stderr = math.sqrt(ssr / (n - 2) / sxx) if n > 2 else float("inf")
    return float(slope), stderr, min(max(r2, 0.0), 1.0)


def _best_window(t, y, lo, hi):
    """Longest contiguous [lo, hi) slice whose log-linear fit has R^2 >= threshold."""
    n = hi - lo
    tt = t[lo:hi]
    yy = y[lo:hi]
    # prefix sums give every window's regression in O(1)
    z = np.zeros(1)
    st = np.concatenate([z, np.cumsum(tt)])
    sy = np.concatenate([z, np.cumsum(yy)])
    stt = np.concatenate([z, np.cumsum(tt * tt)])
    syy = np.concatenate([z, np.cumsum(yy * yy)])
    sty = np.concatenate([z, np.cumsum(tt * yy)])
    for length in range(n, MIN_SAMPLES - 1, -1):
        a = np.arange(0, n - length + 1)
        b = a + length
        cnt = float(length)
        mt = (st[b] - st[a]) / cnt
        my = (sy[b] - sy[a]) / cnt
        vxx = (stt[b] - stt[a]) - cnt * mt * mt
        vyy = (syy[b] - syy[a]) - cnt * my * my
        vxy = (sty[b] - sty[a]) - cnt * mt * my
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = np.where(vyy > 0, vxy * vxy / (vxx * vyy), 1.0)
        ok = np.nonzero(r2 >= MIN_R_SQUARED)[0]
        if ok.size:
            start = int(lo + ok[0])
            return start, start + int(length)
    return None


def fit_growth_rate(trajectory, window=None):
    """Least-squares slope of ln M(t).

    Without ``window`` the fit uses the longest contiguous stretch where
    ``10 M(0) <= M <= max(M) / 10`` and the log-linear fit has
    ``R^2 >= 0.999``. ``trajectory`` may be a :class:`Trajectory` or a
    ``(t, m)`` pair.
    """
    t, m = _columns(trajectory)
    if window is not None:
        t0, t1 = window
        if not t0 < t1:
            raise ValueError(f"window start must precede its end, got {window}")
        sel = (t >= t0) & (t <= t1)
        if sel.sum() < MIN_SAMPLES:
            raise NoExponentialPhaseError(f"fewer than {MIN_SAMPLES} samples in window {window}")
        if np.any(m[sel] <= 0):
            raise ValueError("nonpositive magnetization inside the fit window")
        slope, err, r2 = _linfit(t[sel], np.log(m[sel]))
        return GrowthFit(slope, err, (float(t[sel][0]), float(t[sel][-1])), r2, int(sel.sum()))

    if t.size < MIN_SAMPLES:
        raise NoExponentialPhaseError(f"only {t.size} samples")
    floor = FLOOR_FACTOR * m[0]
    ceiling = m.max() / CEILING_FACTOR
    band = (m >= floor) & (m <= ceiling) & (m > 0)
    if not band.any():
        raise NoExponentialPhaseError("magnetization never enters the growth band")
    y = np.log(np.where(m > 0, m, 1.0))
    edges = np.flatnonzero(np.diff(np.concatenate([[0], band.astype(np.int8), [0]])))
    runs = sorted(zip(edges[::2], edges[1::2]), key=lambda r: r[0] - r[1])
    best = None
    for lo, hi in runs:
        if hi - lo < MIN_SAMPLES or (best and hi - lo <= best[1] - best[0]):
            continue
        found = _best_window(t, y, lo, hi)
        if found and (best is None or found[1] - found[0] > best[1] - best[0]):
            best = found
    if best is None:
        raise NoExponentialPhaseError("no stretch of exponential growth with R^2 >= 0.999")
    lo, hi = best
    slope, err, r2 = _linfit(t[lo:hi], y[lo:hi])
    return GrowthFit(slope, err, (float(t[lo]), float(t[hi - 1])), r2, int(hi - lo))


def instantaneous_growth(trajectory):
    """``(t, dM/dt / M)`` with centred differences, one-sided at the ends."""
    t, m = _columns(trajectory)
    if t.size < 3:
        raise ValueError("need at least 3 samples")
    if np.any(m <= 0):
        raise ValueError("magnetization must stay positive")
    dm = np.empty_like(m)
    dm[1:-1] = (m[2:] - m[:-2]) / (t[2:] - t[:-2])
    dm[0] = (m[1] - m[0]) / (t[1] - t[0])
    dm[-1] = (m[-1] - m[-2]) / (t[-1] - t[-2])
    return t, dm / m


def plateau_growth(trajectory, window=None):
    """Median instantaneous growth rate over the exponential window."""
    fit = fit_growth_rate(trajectory, window)
    t, rate = instantaneous_growth(trajectory)
    sel = (t >= fit.window[0]) & (t <= fit.window[1])
    return float(np.median(rate[sel])), fit


def _bessel_series(order, x):
    q = 0.25 * x * x
    term = 1.0 if order == 0 else 0.5 * x
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + order))
        total += term
        if term < 1e-17 * total:
            return total


def _bessel_asymptotic(order, x):
    # I_v(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(v) / x^k
    mu = 4.0 * order * order
    term = 1.0
    total = 1.0
    for k in range(1, 80):
        nxt = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(nxt) > abs(term):
            break  # past the smallest term; the series diverges from here
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * total


def bessel_i(order, x):
    """Modified Bessel function of the first kind, orders 0 and 1, x >= 0."""
    if order not in (0, 1):
        raise ValueError(f"only orders 0 and 1 are supported, got {order}")
    if not x >= 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    if x <= BESSEL_SERIES_MAX:
        return _bessel_series(order, x)
    return _bessel_asymptotic(order, x)


@dataclass(frozen=True)
class EquilibriumPrediction:
    m_eq: float
    t_eq: float
    beta: float


def equilibrium_prediction_cold(tol=1e-12, bracket=(1.05, 10.0)):
    """Canonical equilibrium of the cold system (U = 1/2).

    Solves ``I1(x) / I0(x) = 1 / x`` for ``x = sqrt(beta)`` by bisection;
    then ``M = 1 / x`` and ``T = 1 / beta``.
    """

    def g(x):
        return bessel_i(1, x) / bessel_i(0, x) - 1.0 / x

    lo, hi = bracket
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise ArithmeticError("bracket does not straddle a root; Bessel evaluation is suspect")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) < tol or hi - lo < 1e-15 * mid:
            break
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    else:  # pragma: no cover
        raise ArithmeticError("bisection did not converge")
    x = mid
    return EquilibriumPrediction(m_eq=1.0 / x, t_eq=1.0 / (x * x), beta=x * x)


def timescale_report(gamma, m_reference):
    """Linear rate against the bounce frequency ``sqrt(M)``; no verdict."""
    if not (0.0 < m_reference <= 1.0):
        raise ValueError(f"m_reference must lie in (0, 1], got {m_reference}")
    if not gamma >= 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    omega_b = math.sqrt(m_reference)
    return {"gamma": float(gamma), "omega_b": omega_b, "ratio": gamma / omega_b}


def saturation_stats(trajectory, t_from):
    t, m = _columns(trajectory)
    if not (t[0] <= t_from <= t[-1]):
        raise ValueError(f"t_from={t_from} outside the trajectory span [{t[0]}, {t[-1]}]")
    tail = m[t >= t_from]
    if tail.size == 0:
        raise ValueError("empty tail window")
    return {"mean": float(tail.mean()), "std": float(tail.std()), "samples": int(tail.size)}
