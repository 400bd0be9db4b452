"""hmflab: simulation and linear stability of the Hamiltonian Mean Field model."""
__version__ = "0.1.0"

from hmflab.core import (
    InvalidStateError,
    Magnetization,
    Observables,
    ParticleState,
    energy_per_particle,
    forces,
    magnetization,
    observe,
    total_momentum,
)
from hmflab.integrator import IntegratorConfig, NumericalBlowupError, Trajectory, evolve, step
from hmflab.equilibria import EquilibriumSpec, PerturbationSpec, build_equilibrium, perturb
from hmflab.linstab import exact_growth_rate, gamma_bicluster, gamma_bicluster_largeN, gamma_quiet_start
from hmflab.vlasov import named_density, vlasov_growth_rate
from hmflab.diagnostics import fit_growth_rate

__all__ = [
    "__version__",
    "InvalidStateError",
    "Magnetization",
    "Observables",
    "ParticleState",
    "energy_per_particle",
    "forces",
    "magnetization",
    "observe",
    "total_momentum",
    "IntegratorConfig",
    "NumericalBlowupError",
    "Trajectory",
    "evolve",
    "step",
    "EquilibriumSpec",
    "PerturbationSpec",
    "build_equilibrium",
    "perturb",
    "exact_growth_rate",
    "gamma_bicluster",
    "gamma_bicluster_largeN",
    "gamma_quiet_start",
    "named_density",
    "vlasov_growth_rate",
    "fit_growth_rate",
]
