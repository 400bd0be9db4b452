"""Continuum (N -> infinity) growth rates from the cold-fluid dispersion relation.

Fourier convention: ``n0_k = (1 / 2 pi) * integral n0(theta) exp(-i k theta)``,
so a normalized density has ``n0_0 = 1 / (2 pi)``. For an unmagnetized
profile (``n0_1 = 0``) the only nonzero roots of the dispersion relation
are ``omega^2 = -pi n0_0 +- pi |n0_2|``.
"""
from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from hmflab.core import ParticleState, wrap_angles
from hmflab.quadrature import integrate

__all__ = [
    "MagnetizedProfileError",
    "DensityProfile",
    "DispersionRoots",
    "WarmRate",
    "named_density",
    "fourier_coefficient",
    "dispersion_matrix",
    "dispersion_roots",
    "vlasov_growth_rate",
    "warm_waterbag_growth_rate",
]

TWO_PI = 2.0 * math.pi
UNMAGNETIZED_TOL = 1e-10
NORMALIZATION_TOL = 1e-10
FOURIER_TOL = 1e-13


class MagnetizedProfileError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DensityProfile:
    """Angular density ``n0`` in one of three representations.

    ``analytic``: a vectorized callable on [-pi, pi) plus the points where
    it is not smooth. ``fourier``: a table ``{k: n0_k}`` for k >= 0 (the
    negative harmonics follow by conjugation; harmonics above ``kmax`` are
    zero). ``sample``: particle angles.

    ``fold`` and ``period_support`` describe the ``2 pi / fold`` symmetry
    used by :func:`hmflab.equilibria.sample_density`.
    """

    kind: str
    func: object = None
    breakpoints: tuple = ()
    coefficients: dict = field(default_factory=dict)
    theta: np.ndarray = None
    fold: int = 1
    period_support: tuple = (-math.pi, math.pi)
    name: str = ""

    @property
    def kmax(self):
        return max(self.coefficients) if self.coefficients else 0

    @classmethod
    def analytic(cls, func, breakpoints=(), fold=1, period_support=None, name=""):
        if period_support is None:
            period_support = (-math.pi / fold, math.pi / fold)
        return cls("analytic", func=func, breakpoints=tuple(breakpoints), fold=fold,
                   period_support=tuple(period_support), name=name)

    @classmethod
    def from_fourier(cls, coefficients, name=""):
        table = {int(k): complex(v) for k, v in coefficients.items()}
        if any(k < 0 for k in table):
            raise ValueError("give only k >= 0; negative harmonics are conjugates")
        if abs(table.get(0, 0.0) - 1.0 / TWO_PI) > NORMALIZATION_TOL:
            raise ValueError("n0_0 must equal 1/(2 pi)")
        return cls("fourier", coefficients=table, name=name)

    @classmethod
    def from_sample(cls, theta, name=""):
        if isinstance(theta, ParticleState):
            theta = theta.theta
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 1 or theta.size == 0:
            raise ValueError("need a non-empty 1-D array of angles")
        return cls("sample", theta=theta, name=name)


def _bicluster_density(delta_theta):
    if not (0.0 < delta_theta <= math.pi / 2):
        raise ValueError(f"delta_theta must lie in (0, pi/2], got {delta_theta}")
    height = 1.0 / (4.0 * delta_theta)

    def func(x):
        x = np.asarray(x, dtype=float)
        inside = (np.abs(wrap_angles(x)) <= delta_theta) | (np.abs(wrap_angles(x - math.pi)) <= delta_theta)
        return np.where(inside, height, 0.0)

    marks = [-delta_theta, delta_theta, math.pi - delta_theta, -math.pi + delta_theta]
    return DensityProfile.analytic(func, marks, fold=2, period_support=(-delta_theta, delta_theta),
                                   name=f"bicluster(delta_theta={delta_theta!r})")


def _harmonic_density(k, amplitude):
    k = int(k)
    if k < 1 or not (0.0 <= amplitude <= 1.0):
        raise ValueError("harmonic density needs k >= 1 and 0 <= amplitude <= 1")

    def func(x):
        return (1.0 + amplitude * np.cos(k * np.asarray(x, dtype=float))) / TWO_PI

    return DensityProfile.analytic(func, fold=k, name=f"harmonic(k={k}, amplitude={amplitude!r})")


def _gaussian_bicluster_density(sigma_theta):
    if not sigma_theta > 0:
        raise ValueError("sigma_theta must be > 0")
    norm = 2.0 * sigma_theta * math.sqrt(TWO_PI) * math.erf(math.pi / (2.0 * sigma_theta * math.sqrt(2.0)))

    def func(x):
        y = wrap_angles(np.asarray(x, dtype=float) + math.pi / 2) - math.pi / 2
        y = np.where(y >= math.pi / 2, y - math.pi, y)
        y = np.where(y < -math.pi / 2, y + math.pi, y)
        return np.exp(-y * y / (2.0 * sigma_theta ** 2)) / norm

    return DensityProfile.analytic(func, [-math.pi / 2, math.pi / 2], fold=2,
                                   name=f"gaussian_bicluster(sigma_theta={sigma_theta!r})")


def _uniform_density():
    return DensityProfile.analytic(lambda x: np.full_like(np.asarray(x, dtype=float), 1.0 / TWO_PI),
                                   fold=1, name="uniform")


_CATALOG = {
    "uniform": _uniform_density,
    "bicluster": _bicluster_density,
    "harmonic": _harmonic_density,
    "gaussian_bicluster": _gaussian_bicluster_density,
}


def named_density(name, **params):
    """Look up a density from the built-in catalog.

    ``uniform``; ``bicluster(delta_theta)``: two antipodal waterbags;
    ``harmonic(k, amplitude)``: ``(1 + a cos k theta) / 2 pi``;
    ``gaussian_bicluster(sigma_theta)``: two antipodal truncated Gaussians.
    """
    try:
        factory = _CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown density {name!r}; known: {sorted(_CATALOG)}") from None
    return factory(**params)


def _analytic_coefficient(profile, k):
    if k == 0:
        return integrate(profile.func, -math.pi, math.pi, FOURIER_TOL, profile.breakpoints) / TWO_PI

    def integrand(x):
        return profile.func(x) * np.exp(-1j * k * x)

    return integrate(integrand, -math.pi, math.pi, FOURIER_TOL, profile.breakpoints) / TWO_PI


def _check_normalized(profile):
    if profile.kind != "analytic":
        return
    total = integrate(profile.func, -math.pi, math.pi, FOURIER_TOL, profile.breakpoints)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"density {profile.name or ''} is not normalized (integral = {total!r})")


def fourier_coefficient(profile, k):
    k = int(k)
    if profile.kind == "analytic":
        _check_normalized(profile)
        return complex(_analytic_coefficient(profile, k))
    if profile.kind == "fourier":
        v = profile.coefficients.get(abs(k), 0.0)
        return complex(v).conjugate() if k < 0 else complex(v)
    if profile.kind == "sample":
        theta = profile.theta
        return complex(np.mean(np.exp(-1j * k * theta)) / TWO_PI)
    raise ValueError(f"unknown profile kind {profile.kind!r}")


def _require_unmagnetized(profile):
    n1 = fourier_coefficient(profile, 1)
    if abs(n1) >= UNMAGNETIZED_TOL:
        raise MagnetizedProfileError(f"|n0_1| = {abs(n1):.3g} is not below {UNMAGNETIZED_TOL:g}")


@dataclass(frozen=True)
class DispersionRoots:
    """``omega^2`` roots; ``admissible`` fails when ``|n0_2| > n0_0``."""

    omega_sq_plus: float
    omega_sq_minus: float
    n00: float
    n02: complex

    @property
    def admissible(self):
        return self.omega_sq_minus <= self.omega_sq_plus <= 0.0


def dispersion_roots(profile):
    _require_unmagnetized(profile)
    n00 = fourier_coefficient(profile, 0).real
    n02 = fourier_coefficient(profile, 2)
    roots = DispersionRoots(
        -math.pi * n00 + math.pi * abs(n02),
        -math.pi * n00 - math.pi * abs(n02),
        n00,
        n02,
    )
    if not roots.admissible:
        warnings.warn("|n0_2| exceeds n0_0; profile cannot be a nonnegative density",
                      RuntimeWarning, stacklevel=2)
    return roots


def vlasov_growth_rate(profile):
    """``sqrt((1 + 2 pi |n0_2|) / 2)`` for a normalized unmagnetized profile."""
    roots = dispersion_roots(profile)
    return math.sqrt(max(-roots.omega_sq_minus, 0.0))


def dispersion_matrix(profile, omega, order):
    """Truncated dispersion matrix over harmonics ``-order..order``.

    ``M_kl = omega^2 delta_kl + k pi (delta_l,1 n0_(k-1) - delta_l,-1 n0_(k+1))``.
    """
    ks = range(-order, order + 1)
    coeff = {j: fourier_coefficient(profile, j) for j in range(-order - 1, order + 2)}
    size = 2 * order + 1
    m = np.zeros((size, size), dtype=complex)
    w2 = complex(omega) ** 2
    for r, k in enumerate(ks):
        m[r, r] += w2
        for c, l in enumerate(ks):
            if l == 1:
                m[r, c] += k * math.pi * coeff[k - 1]
            elif l == -1:
                m[r, c] -= k * math.pi * coeff[k + 1]
    return m


@dataclass(frozen=True)
class WarmRate:
    gamma: float
    stable: bool


def warm_waterbag_growth_rate(temperature):
    """Homogeneous warm-waterbag rate ``sqrt(1/2 - 3T)``; stable for T >= 1/6."""
    if not temperature >= 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    arg = 0.5 - 3.0 * temperature
    if arg <= 0.0:
        return WarmRate(0.0, True)
    return WarmRate(math.sqrt(arg), False)
