"""Particle state, magnetization and conserved quantities of the HMF model.

The model is N unit-mass rotators on a circle with Hamiltonian
``H = sum p_i^2 / 2 + (1 / 2N) sum_ij [1 - cos(theta_i - theta_j)]``.
Everything here is a pure function of an immutable :class:`ParticleState`.
"""
from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "InvalidStateError",
    "ParticleState",
    "Magnetization",
    "Observables",
    "magnetization",
    "forces",
    "energy_per_particle",
    "total_momentum",
    "observe",
    "wrap_angles",
]


class InvalidStateError(ValueError):
    """Raised for empty, ragged or non-finite particle states."""


def wrap_angles(theta):
    """Map angles onto the canonical range [-pi, pi)."""
    wrapped = np.mod(np.asarray(theta, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    # mod can round up to exactly 2*pi for tiny negative inputs
    return np.where(wrapped >= math.pi, wrapped - 2.0 * math.pi, wrapped)


def _frozen(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ParticleState:
    """Angles and momenta of N particles.

    Angles are stored as given (unwrapped); use :meth:`normalized` for the
    canonical [-pi, pi) representation. Both arrays are read-only copies.
    """

    theta: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        theta = np.atleast_1d(self.theta)
        p = np.atleast_1d(self.p)
        if theta.ndim != 1 or p.ndim != 1:
            raise InvalidStateError("theta and p must be one-dimensional")
        if theta.shape != p.shape:
            raise InvalidStateError(
                f"theta and p lengths differ ({theta.size} vs {p.size})"
            )
        if theta.size == 0:
            raise InvalidStateError("a state needs at least one particle")
        if not np.all(np.isfinite(theta)):
            raise InvalidStateError("non-finite angle")
        object.__setattr__(self, "theta", _frozen(theta))
        object.__setattr__(self, "p", _frozen(p))

    @property
    def n(self):
        return self.theta.shape[0]

    @classmethod
    def cold(cls, theta):
        """State with the given angles and all momenta zero."""
        theta = np.asarray(theta, dtype=float)
        return cls(theta, np.zeros_like(theta))

    def normalized(self):
        return ParticleState(wrap_angles(self.theta), self.p)

    def with_theta(self, theta):
        return ParticleState(theta, self.p)

    def is_cold(self):
        return not np.any(self.p)


@dataclass(frozen=True)
class Magnetization:
    mx: float
    my: float
    m: float

    @classmethod
    def from_components(cls, mx, my):
        return cls(float(mx), float(my), math.hypot(mx, my))


@dataclass(frozen=True)
class Observables:
    """One sampled row of a trajectory."""

    t: float
    mx: float
    my: float
    m: float
    u: float
    p_total: float


def _mean(values, compensated):
    if compensated:
        return math.fsum(values) / len(values)
    return float(np.sum(values)) / len(values)


def magnetization(state, compensated=False):
    """Order parameter ``(mx, my, m)`` of ``state``.

    ``compensated=True`` switches the two sums to exactly rounded
    summation (``math.fsum``); worth it only for N beyond ~1e5.
    """
    if not isinstance(state, ParticleState):
        raise InvalidStateError("expected a ParticleState")
    mx = _mean(np.cos(state.theta), compensated)
    my = _mean(np.sin(state.theta), compensated)
    return Magnetization.from_components(mx, my)


def forces(state, compensated=False):
    """Mean-field force ``F_k = My cos(theta_k) - Mx sin(theta_k)``, O(N)."""
    mag = magnetization(state, compensated)
    return mag.my * np.cos(state.theta) - mag.mx * np.sin(state.theta)


def energy_per_particle(state, compensated=False):
    mag = magnetization(state, compensated)
    kinetic = _mean(state.p * state.p, compensated) / 2.0
    return kinetic + 0.5 * (1.0 - mag.m * mag.m)


def total_momentum(state):
    return math.fsum(state.p)


def observe(state, t=0.0):
    mag = magnetization(state)
    kinetic = float(np.dot(state.p, state.p)) / (2.0 * state.n)
    return Observables(
        t=float(t),
        mx=mag.mx,
        my=mag.my,
        m=mag.m,
        u=kinetic + 0.5 * (1.0 - mag.m * mag.m),
        p_total=math.fsum(state.p),
    )
