"""Random-matrix estimate of the growth rate of random symmetric biclusters.

For a bicluster whose first half is drawn i.i.d. from ``f0`` and whose
second half is the pi-shifted mirror, the growth rate is governed by the
top eigenvalue of ``L_ij = cos(theta_i - theta_j)`` (i, j over the first
half). The Furedi-Komlos law for random symmetric matrices with entry
mean ``mu > 0`` and variance ``sigma^2`` gives that eigenvalue as normal
with mean ``1 + (N/2 - 1) mu + sigma^2 / mu``; rescaled by 2/N it becomes
``<lambda^2>``.
"""
from dataclasses import dataclass
import math

import numpy as np

from hmflab.linstab import sinc
from hmflab.quadrature import integrate, integrate2d

__all__ = [
    "TheoremInapplicableError",
    "MomentPair",
    "RmtPrediction",
    "waterbag_density",
    "truncated_gaussian_density",
    "moments_quadrature",
    "moments_uniform",
    "moments_gaussian",
    "moments_uniform_printed",
    "moments_gaussian_printed",
    "complex_erf",
    "expected_lambda_sq",
    "expected_gamma",
    "predict",
]

QUAD_TOL = 1e-10
# below this width sqrt is linear across the law to ~1e-14
NARROW_WIDTH = 1e-7


class TheoremInapplicableError(ValueError):
    """Entry mean ``mu <= 0``: the largest-eigenvalue law does not apply."""


@dataclass(frozen=True)
class MomentPair:
    """Mean and variance of ``cos(theta_i - theta_j)`` under ``f0 x f0``."""

    mu: float
    sigma_sq: float
    source: str = "quadrature"


@dataclass(frozen=True)
class RmtPrediction:
    n: int
    lambda_sq_mean: float
    lambda_sq_var: float
    gamma_mean: float


@dataclass(frozen=True)
class Density:
    """A probability density on ``[a, b]`` (zero elsewhere).

    ``points`` are optional quadrature breakpoints around narrow features.
    """

    func: object
    a: float
    b: float
    points: tuple = ()

    def __call__(self, x):
        return self.func(x)


def waterbag_density(delta_theta):
    h = 1.0 / (2.0 * delta_theta)
    return Density(lambda x: np.full_like(np.asarray(x, dtype=float), h), -delta_theta, delta_theta)


def truncated_gaussian_density(sigma_theta):
    """Centred normal of scale ``sigma_theta`` restricted to [-pi/2, pi/2]."""
    norm = sigma_theta * math.sqrt(2.0 * math.pi) * math.erf(math.pi / (2.0 * sigma_theta * math.sqrt(2.0)))
    s2 = 2.0 * sigma_theta * sigma_theta
    marks = tuple(k * sigma_theta for k in (-10, -4, -1, 0, 1, 4, 10) if abs(k * sigma_theta) < math.pi / 2)
    return Density(lambda x: np.exp(-np.square(x) / s2) / norm, -math.pi / 2, math.pi / 2, marks)


def moments_quadrature(density, tol=QUAD_TOL):
    """``mu`` and ``sigma^2`` from their defining double integrals."""
    a, b = density.a, density.b
    pts = density.points
    total = integrate(density, a, b, tol, pts)
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"density is not normalized (integral = {total!r})")

    def weighted(g):
        return integrate2d(lambda x, y: density(x) * density(y) * g(x - y), (a, b), (a, b), tol, pts, pts)

    mu = weighted(np.cos)
    second = weighted(lambda d: np.cos(d) ** 2)
    sigma_sq = second - mu * mu
    if sigma_sq < -1e-10:
        raise ArithmeticError(f"negative variance {sigma_sq:g}; quadrature failed")
    return MomentPair(float(mu), float(max(sigma_sq, 0.0)), "quadrature")


def moments_uniform(delta_theta):
    """Waterbag moments: closed-form ``mu = sinc^2``, quadrature ``sigma^2``."""
    if not (0.0 < delta_theta < math.pi / 2):
        raise ValueError(f"delta_theta must lie in (0, pi/2), got {delta_theta}")
    mu = sinc(delta_theta) ** 2
    sigma_sq = moments_quadrature(waterbag_density(delta_theta)).sigma_sq
    return MomentPair(mu, sigma_sq, "closed-form/quadrature")


def moments_gaussian(sigma_theta):
    if not sigma_theta > 0:
        raise ValueError(f"sigma_theta must be > 0, got {sigma_theta}")
    return moments_quadrature(truncated_gaussian_density(sigma_theta))


def moments_uniform_printed(delta_theta):
    """Published closed forms for the waterbag, kept as a cross-check.

    The ``sigma^2`` expression carries ``cos^2 sinc^2 / 4 = sinc^2(2 dtheta) / 4``
    where the defining integral yields ``sinc^2(2 dtheta) / 2``; compare
    with :func:`moments_uniform` before trusting it.
    """
    mu = sinc(delta_theta) ** 2
    sigma_sq = 0.5 + math.cos(delta_theta) ** 2 / 4.0 * sinc(delta_theta) ** 2 - mu * mu
    return MomentPair(mu, sigma_sq, "closed-form")


def complex_erf(z, tol=1e-8):
    """erf(z) for complex z by quadrature along the segment [0, z]."""
    z = complex(z)
    val = integrate(lambda s: np.exp(-(z * s) ** 2), 0.0, 1.0, tol * math.sqrt(math.pi) / (2.0 * max(abs(z), 1.0)))
    return 2.0 * z * val / math.sqrt(math.pi)


def moments_gaussian_printed(sigma_theta):
    """Published complex-erf closed forms for the truncated Gaussian."""
    r2 = math.sqrt(2.0)
    e0 = math.erf(math.pi / (2.0 * sigma_theta * r2))
    s2 = sigma_theta * sigma_theta
    e1 = complex_erf((math.pi - 2j * s2) / (2.0 * sigma_theta * r2)).real
    e2 = complex_erf((math.pi - 4j * s2) / (2.0 * sigma_theta * r2)).real
    mu = math.exp(-s2) / e0**2 * e1**2
    sigma_sq = 0.5 + math.exp(-4.0 * s2) / 8.0 / e0**2 * (2.0 * e2) ** 2 - mu * mu
    return MomentPair(float(mu), float(sigma_sq), "closed-form")


def _check(n, moments):
    if n < 4 or n % 2:
        raise ValueError(f"n must be even and >= 4, got {n}")
    if moments.mu <= 0:
        raise TheoremInapplicableError(f"entry mean mu = {moments.mu:g} must be positive")


def expected_lambda_sq(n, moments):
    """Mean and variance of the top stability eigenvalue ``lambda^2``."""
    _check(n, moments)
    mu, s2 = moments.mu, moments.sigma_sq
    mean = (2.0 / n) * (1.0 + (n / 2.0 - 1.0) * mu + s2 / mu)
    return mean, 8.0 * s2 / (n * n)


def expected_gamma(n, moments, tol=QUAD_TOL):
    """Mean growth rate, averaging sqrt(x) over the normal law for lambda^2.

    The law is restricted to x in [0, 1] and renormalized there.
    """
    mean, var = expected_lambda_sq(n, moments)
    if var == 0.0:
        return _edge_value(mean)
    scale = n * n / (16.0 * moments.sigma_sq)
    width = 1.0 / math.sqrt(scale)
    if width < NARROW_WIDTH:
        return _narrow_value(mean, width)
    marks = [mean + k * width for k in (-12, -4, -1, 0, 1, 4, 12)]

    def weight(x):
        return np.exp(-scale * np.square(x - mean))

    norm = integrate(weight, 0.0, 1.0, tol, marks)
    if norm <= 0.0:
        return _edge_value(mean)
    num = integrate(lambda x: np.sqrt(x) * weight(x), 0.0, 1.0, tol, marks)
    return float(num / norm)


def _narrow_value(mean, width):
    # sqrt is linear across the law: use the truncated-normal mean in closed form
    sd = width / math.sqrt(2.0)
    if sd == 0.0:
        return _edge_value(mean)
    a = -mean / sd
    b = (1.0 - mean) / sd
    z = 0.5 * (math.erf(b / math.sqrt(2.0)) - math.erf(a / math.sqrt(2.0)))
    if z <= 0.0:
        return _edge_value(mean)
    phi = (math.exp(-0.5 * a * a) - math.exp(-0.5 * b * b)) / math.sqrt(2.0 * math.pi)
    return math.sqrt(min(max(mean + sd * phi / z, 0.0), 1.0))


def _edge_value(mean):
    # point-mass limit, clipped onto [0, 1]
    return 1.0 if mean > 1.0 else (0.0 if mean < 0.0 else math.sqrt(mean))


def predict(n, moments):
    mean, var = expected_lambda_sq(n, moments)
    return RmtPrediction(n, mean, var, expected_gamma(n, moments))
