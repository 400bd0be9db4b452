"""Fourth-order symplectic time stepping and trajectory sampling."""
from dataclasses import dataclass, field
import math

import numpy as np

from hmflab import kernels
from hmflab.core import Observables, ParticleState, observe

__all__ = [
    "SCHEMES",
    "NumericalBlowupError",
    "IntegratorConfig",
    "Trajectory",
    "step",
    "evolve",
]

SCHEMES = {
    "yoshida4": kernels.YOSHIDA4,
    "leapfrog2": kernels.LEAPFROG2,
}

DEFAULT_DT = 0.05


class NumericalBlowupError(ArithmeticError):
    """The state became non-finite; ``step_index`` is the offending step."""

    def __init__(self, step_index, t=None):
        self.step_index = step_index
        self.t = t
        where = f" (t={t:g})" if t is not None else ""
        super().__init__(f"non-finite state after step {step_index}{where}")


def _weights(scheme):
    try:
        return SCHEMES[scheme]
    except KeyError:
        raise ValueError(
            f"unknown scheme {scheme!r}; expected one of {sorted(SCHEMES)}"
        ) from None


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = DEFAULT_DT
    t_end: float = 40.0
    sample_every: int = 1
    scheme: str = "yoshida4"

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be a positive number, got {self.dt}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError(f"sample_every must be an integer >= 1, got {self.sample_every}")
        _weights(self.scheme)


@dataclass
class Trajectory:
    """Observables sampled during a run, stored column-wise."""

    t: np.ndarray
    mx: np.ndarray
    my: np.ndarray
    m: np.ndarray
    u: np.ndarray
    p_total: np.ndarray
    initial: ParticleState
    final: ParticleState
    config: IntegratorConfig = field(default_factory=IntegratorConfig)

    COLUMNS = ("t", "mx", "my", "m", "u", "p_total")

    @classmethod
    def from_rows(cls, rows, initial, final, config):
        cols = {name: np.array([getattr(r, name) for r in rows]) for name in cls.COLUMNS}
        return cls(initial=initial, final=final, config=config, **cols)

    def __len__(self):
        return self.t.shape[0]

    def __getitem__(self, i):
        return Observables(*(float(getattr(self, name)[i]) for name in self.COLUMNS))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def energy_drift(self):
        """Largest relative energy excursion ``|U(t) - U(0)| / |U(0)|``."""
        u0 = self.u[0]
        scale = abs(u0) if u0 != 0 else 1.0
        return float(np.max(np.abs(self.u - u0)) / scale)

    def momentum_drift(self):
        return float(np.max(np.abs(self.p_total - self.p_total[0])))


def _check_dt(dt):
    if not math.isfinite(dt) or dt == 0:
        raise ValueError(f"dt must be finite and non-zero, got {dt}")


def step(state, dt, scheme="yoshida4"):
    """One composed kick-drift-kick step.

    ``yoshida4`` is the triple-jump composition of velocity Verlet with
    weights ``(x1, x0, x1)``, ``x1 = 1/(2 - 2^(1/3))``,
    ``x0 = -2^(1/3)/(2 - 2^(1/3))``; ``leapfrog2`` is plain velocity
    Verlet. A negative ``dt`` integrates backwards.
    """
    _check_dt(dt)
    weights = _weights(scheme)
    theta = np.array(state.theta)
    p = np.array(state.p)
    force = np.empty_like(theta)
    kernels.mean_field(theta, force)
    bad = kernels.advance(theta, p, force, float(dt), 1, weights)
    if bad >= 0 or not np.all(np.isfinite(p)):
        raise NumericalBlowupError(0)
    return ParticleState(theta, p)


def _schedule(config):
    # whole steps, then one shortened step landing exactly on t_end
    n_full = int(math.floor(config.t_end / config.dt + 1e-9))
    remainder = config.t_end - n_full * config.dt
    if remainder <= 1e-9 * config.dt:
        remainder = 0.0
    return n_full, remainder


def evolve(state, config=None):
    """Integrate ``state`` to ``config.t_end`` and sample observables.

    A sample is taken at t = 0, after every ``sample_every`` steps and at
    ``t_end`` itself.
    """
    config = config or IntegratorConfig()
    weights = _weights(config.scheme)
    n_full, remainder = _schedule(config)

    theta = np.array(state.theta)
    p = np.array(state.p)
    force = np.empty_like(theta)
    kernels.mean_field(theta, force)

    rows = [observe(state, 0.0)]
    done = 0
    while done < n_full:
        chunk = min(config.sample_every, n_full - done)
        bad = kernels.advance(theta, p, force, config.dt, chunk, weights)
        if bad >= 0:
            raise NumericalBlowupError(done + bad, (done + bad + 1) * config.dt)
        done += chunk
        if done % config.sample_every == 0 or done == n_full:
            rows.append(_observe_arrays(theta, p, done * config.dt))
    if remainder > 0.0:
        bad = kernels.advance(theta, p, force, remainder, 1, weights)
        if bad >= 0:
            raise NumericalBlowupError(n_full, config.t_end)
        rows.append(_observe_arrays(theta, p, config.t_end))
    elif n_full > 0:
        # pin the last timestamp to t_end exactly
        last = rows[-1]
        rows[-1] = Observables(config.t_end, last.mx, last.my, last.m, last.u, last.p_total)

    if not np.all(np.isfinite(p)):
        raise NumericalBlowupError(n_full, config.t_end)
    final = ParticleState(theta, p)
    return Trajectory.from_rows(rows, initial=state, final=final, config=config)


def _observe_arrays(theta, p, t):
    return observe(ParticleState(theta, p), t)
