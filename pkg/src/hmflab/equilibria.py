"""Cold force-free (zero magnetization) initial states and their perturbation.

Random generators draw from ``numpy.random.Generator(PCG64(seed))`` and
consume the stream strictly in particle-index order, so a given
``(spec, seed)`` yields bit-identical angles on every platform and thread
count. Ensembles use one seed per member (see :func:`hmflab.cli.derive_seeds`).
"""
from dataclasses import dataclass
import math

import numpy as np

from hmflab.core import ParticleState

__all__ = [
    "KINDS",
    "EquilibriumSpec",
    "PerturbationSpec",
    "quiet_start",
    "bicluster",
    "random_sym_bicluster",
    "sample_density",
    "perturb",
    "default_epsilon",
    "build_equilibrium",
]

KINDS = (
    "quiet_start",
    "bicluster",
    "random_uniform_bicluster",
    "random_gaussian_bicluster",
    "custom_symmetric",
)


def _check_delta(delta_theta):
    if not (0.0 < delta_theta <= math.pi / 2):
        raise ValueError(f"delta_theta must lie in (0, pi/2], got {delta_theta}")


def _check_even(n):
    if n < 2 or n % 2:
        raise ValueError(f"bicluster states need an even n >= 2, got {n}")


def quiet_start(n):
    """Equally spaced angles ``theta_k = 2 pi k / n`` (k = 1..n), zero momenta."""
    if n < 2:
        raise ValueError(f"quiet start needs n >= 2, got {n}")
    k = np.arange(1, n + 1)
    return ParticleState.cold(2.0 * math.pi * k / n)


def bicluster(n, delta_theta):
    """Two antipodal uniform clusters of half-width ``delta_theta``.

    ``theta_k = -dtheta + 4 k dtheta / n`` for k = 1..n/2, and the second
    half is the first rotated by pi.
    """
    _check_even(n)
    _check_delta(delta_theta)
    half = n // 2
    k = np.arange(1, half + 1)
    first = -delta_theta + 4.0 * k * delta_theta / n
    return ParticleState.cold(np.concatenate([first, first + math.pi]))


def _truncated_normal(rng, size, sigma, bound):
    # rejection against the untruncated N(0, sigma^2), filled in index order
    out = np.empty(size)
    filled = 0
    while filled < size:
        draw = rng.normal(0.0, sigma, size=max(size - filled, 16))
        draw = draw[np.abs(draw) <= bound]
        take = min(draw.size, size - filled)
        out[filled:filled + take] = draw[:take]
        filled += take
    return out


def random_sym_bicluster(n, dist="uniform", *, delta_theta=None, sigma_theta=None, seed=0):
    """Random half-population plus its exact pi-shifted mirror.

    ``dist="uniform"`` draws the first n/2 angles from the waterbag on
    [-delta_theta, delta_theta]; ``dist="gaussian"`` from a centred normal
    of scale ``sigma_theta`` truncated to [-pi/2, pi/2].
    """
    _check_even(n)
    rng = np.random.default_rng(seed)
    half = n // 2
    if dist == "uniform":
        if delta_theta is None:
            raise ValueError("uniform bicluster needs delta_theta")
        _check_delta(delta_theta)
        first = rng.uniform(-delta_theta, delta_theta, size=half)
    elif dist == "gaussian":
        if sigma_theta is None or not sigma_theta > 0:
            raise ValueError(f"sigma_theta must be > 0, got {sigma_theta}")
        first = _truncated_normal(rng, half, sigma_theta, math.pi / 2)
    else:
        raise ValueError(f"unknown distribution {dist!r}")
    return ParticleState.cold(np.concatenate([first, first + math.pi]))


def sample_density(n, pdf, support, fold, grid=1 << 16):
    """Deterministic quantile sample of a ``2 pi / fold``-periodic density.

    ``pdf`` is evaluated on ``support`` (an interval inside one period,
    outside of which the density vanishes); n/fold particles sit at the
    mid-quantiles of that period and the block is copied onto the other
    ``fold - 1`` periods. For ``fold >= 2`` the copies cancel the
    magnetization exactly.
    """
    if fold < 1 or n % fold:
        raise ValueError(f"n={n} must be a positive multiple of fold={fold}")
    if n < 2:
        raise ValueError("need n >= 2")
    a, b = support
    if not (b > a and b - a <= 2 * math.pi / fold + 1e-12):
        raise ValueError(f"support {support} does not fit in one period")
    x = np.linspace(a, b, grid + 1)
    w = np.asarray(pdf(x), dtype=float)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("density must be finite and nonnegative")
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(x))])
    if cdf[-1] <= 0:
        raise ValueError("density integrates to zero")
    cdf /= cdf[-1]
    per = n // fold
    q = (np.arange(per) + 0.5) / per
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    block = np.interp(q, cdf[keep], x[keep])
    shifts = 2.0 * math.pi * np.arange(fold) / fold
    theta = (block[None, :] + shifts[:, None]).ravel()
    return ParticleState.cold(theta)


def default_epsilon(n):
    return 0.01 * 2.0 * math.pi / n


@dataclass(frozen=True)
class PerturbationSpec:
    """Uniform random angular kick of amplitude ``epsilon``.

    ``epsilon=None`` resolves to :func:`default_epsilon` for the state size.
    """

    epsilon: float | None = None
    seed: int = 0

    def resolve(self, n):
        eps = default_epsilon(n) if self.epsilon is None else float(self.epsilon)
        limit = 0.1 * 2.0 * math.pi / n
        if not (0.0 < eps <= limit):
            raise ValueError(f"epsilon must lie in (0, {limit:.3g}] for n={n}, got {eps}")
        return eps


def perturb(state, pert=None):
    """Shift every angle by an independent uniform draw on [-eps, eps]."""
    pert = pert or PerturbationSpec()
    eps = pert.resolve(state.n)
    rng = np.random.default_rng(pert.seed)
    kick = rng.uniform(-eps, eps, size=state.n)
    return ParticleState(state.theta + kick, state.p)


@dataclass(frozen=True)
class EquilibriumSpec:
    """Declarative description of an initial equilibrium.

    For ``custom_symmetric`` the density is looked up by name with
    :func:`hmflab.vlasov.named_density`; ``params`` carries its keyword
    arguments.
    """

    kind: str
    n: int
    delta_theta: float | None = None
    sigma_theta: float | None = None
    density: str | None = None
    params: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown equilibrium kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if self.kind in ("bicluster", "random_uniform_bicluster"):
            _check_even(self.n)
            if self.delta_theta is None:
                raise ValueError(f"{self.kind} needs delta_theta")
            _check_delta(self.delta_theta)
        if self.kind == "random_gaussian_bicluster":
            _check_even(self.n)
            if self.sigma_theta is None or not self.sigma_theta > 0:
                raise ValueError("random_gaussian_bicluster needs sigma_theta > 0")
        if self.kind == "custom_symmetric" and not self.density:
            raise ValueError("custom_symmetric needs a density name")

    @property
    def is_random(self):
        return self.kind.startswith("random_")


def build_equilibrium(spec):
    if spec.kind == "quiet_start":
        return quiet_start(spec.n)
    if spec.kind == "bicluster":
        return bicluster(spec.n, spec.delta_theta)
    if spec.kind == "random_uniform_bicluster":
        return random_sym_bicluster(spec.n, "uniform", delta_theta=spec.delta_theta, seed=spec.seed)
    if spec.kind == "random_gaussian_bicluster":
        return random_sym_bicluster(spec.n, "gaussian", sigma_theta=spec.sigma_theta, seed=spec.seed)
    from hmflab.vlasov import named_density

    profile = named_density(spec.density, **dict(spec.params))
    return sample_density(spec.n, profile.func, profile.period_support, profile.fold)
