"""Exact finite-N linear stability of cold unmagnetized equilibria.

Linearizing about a cold force-free state gives ``d2/dt2 dtheta = A dtheta``
with ``A_ij = cos(theta_i - theta_j) / N``; the Jacobian eigenvalues are
the square roots of the eigenvalues of A. Since
``A = (c c^T + s s^T) / N`` (c = cos theta, s = sin theta), A has rank at
most two and its nonzero spectrum is that of a 2x2 Gram matrix.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np

from hmflab import kernels

__all__ = [
    "NonSymmetricMatrixError",
    "NonConvergenceError",
    "DegenerateFrequencyError",
    "StabilityMatrix",
    "GrowthRateResult",
    "build_stability_matrix",
    "exact_growth_rate",
    "dense_symmetric_eigen",
    "gamma_quiet_start",
    "toeplitz_cos_eigen",
    "gamma_bicluster",
    "gamma_bicluster_largeN",
    "sinc",
]

DENSE_MAX_N = 2048
JACOBI_MAX_SWEEPS = 100
DEGENERATE_SIN = 1e-14


class NonSymmetricMatrixError(ValueError):
    pass


class NonConvergenceError(ArithmeticError):
    pass


class DegenerateFrequencyError(ValueError):
    """sin(omega) vanishes; use the omega -> 0 limit ``(m, 0)`` instead."""


def sinc(x):
    """Unnormalized sinc, ``sin(x) / x`` with ``sinc(0) = 1``."""
    return float(np.sinc(x / math.pi))


@dataclass(frozen=True, eq=False)
class StabilityMatrix:
    entries: np.ndarray

    @property
    def n(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class GrowthRateResult:
    """Growth rate from the top eigenvalue of the stability matrix.

    ``unstable`` is False when no eigenvalue is positive, in which case
    ``gamma`` is reported as 0 rather than imaginary.
    """

    gamma: float
    lambda_sq: float
    method: str
    eigenvalues: tuple = ()

    @property
    def unstable(self):
        return self.lambda_sq > 0.0


def _from_lambda_sq(lam, method, eigenvalues=()):
    return GrowthRateResult(math.sqrt(max(lam, 0.0)), float(lam), method, tuple(eigenvalues))


def _warn_if_warm(state):
    if not state.is_cold():
        warnings.warn(
            "stability matrix assumes a cold state (all p = 0); momenta ignored",
            RuntimeWarning,
            stacklevel=3,
        )


def build_stability_matrix(state):
    _warn_if_warm(state)
    c = np.cos(state.theta)
    s = np.sin(state.theta)
    a = (np.outer(c, c) + np.outer(s, s)) / state.n
    a = 0.5 * (a + a.T)
    np.fill_diagonal(a, 1.0 / state.n)
    a.setflags(write=False)
    return StabilityMatrix(a)


def _sym2_eigen(a, b, d):
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), b)
    return mean + radius, mean - radius


def exact_growth_rate(state):
    """Growth rate via the rank-2 Gram reduction, O(N)."""
    _warn_if_warm(state)
    c = np.cos(state.theta)
    s = np.sin(state.theta)
    n = state.n
    hi, lo = _sym2_eigen(np.dot(c, c) / n, np.dot(c, s) / n, np.dot(s, s) / n)
    return _from_lambda_sq(hi, "gram-rank2", (hi, lo))


def dense_symmetric_eigen(matrix):
    """All eigenvalues of a symmetric matrix by cyclic Jacobi, descending.

    Converged once every off-diagonal entry is below 1e-12 times the
    Frobenius norm.
    """
    a = matrix.entries if isinstance(matrix, StabilityMatrix) else matrix
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetricMatrixError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > DENSE_MAX_N:
        raise ValueError(f"dense eigensolver limited to n <= {DENSE_MAX_N}, got {n}")
    fro = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-13 * max(fro, 1e-300):
        raise NonSymmetricMatrixError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    diag, sweeps = kernels.jacobi_eigenvalues(a, 1e-12 * fro, JACOBI_MAX_SWEEPS)
    if sweeps > JACOBI_MAX_SWEEPS:
        raise NonConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return np.sort(diag)[::-1]


def gamma_quiet_start():
    """Quiet-start growth rate, 1/sqrt(2) for every N (no finite-N correction)."""
    return math.sqrt(0.5)


def toeplitz_cos_eigen(m, omega):
    """Two nonzero eigenvalues of the m x m Toeplitz matrix ``t_k = cos(k omega)``.

    Returns ``(nu_plus, nu_minus) = (m +- sin(m omega) / sin(omega)) / 2``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    s = math.sin(omega)
    if abs(s) < DEGENERATE_SIN:
        raise DegenerateFrequencyError(
            f"|sin(omega)| < {DEGENERATE_SIN:g}; the omega -> 0 limit is ({m}, 0)"
        )
    ratio = math.sin(m * omega) / s
    return 0.5 * (m + ratio), 0.5 * (m - ratio)


def _check_bicluster_args(delta_theta):
    if not (0.0 < delta_theta <= math.pi / 2):
        raise ValueError(f"delta_theta must lie in (0, pi/2], got {delta_theta}")


def gamma_bicluster(n, delta_theta):
    """Finite-N growth rate of the deterministic bicluster."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    _check_bicluster_args(delta_theta)
    if delta_theta == math.pi / 2:
        return gamma_quiet_start()
    lam = 0.5 + math.sin(2.0 * delta_theta) / (n * math.sin(4.0 * delta_theta / n))
    return math.sqrt(lam)


def gamma_bicluster_largeN(delta_theta):
    """N -> infinity limit ``sqrt((1 + sinc(2 dtheta)) / 2)``."""
    _check_bicluster_args(delta_theta)
    return math.sqrt((1.0 + sinc(2.0 * delta_theta)) / 2.0)
