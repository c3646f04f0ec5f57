"""
qhydro: hydrodynamic (Madelung-Bohm) representation of quantum mechanics.

Submodules
----------
core          grids, fields, constants and finite differences
qpotential    quantum potential in flat, static and curved settings
eigensolver   bound states and hydrodynamic force balance
dynamics      time evolution of ``(R, S)`` and relativistic checks
vacuum_noise  correlated vacuum fluctuation fields
blackhole     collapsed profile and minimum black-hole mass
cli           batch command line front end
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Grid1D,
    GridError,
    PhysicalConstants,
    RadialGrid,
    ScalarField,
    Scenario,
    make_radial_grid,
    make_uniform_grid,
)
from .qpotential import (  # noqa: E402
    MaskedAmplitudeError,
    QuantumPotentialField,
    quantum_energy,
    vqu_curved_radial,
    vqu_curved_radial_metric,
    vqu_nonrel,
    vqu_rel_static,
)
from .eigensolver import Eigenstate, NotConfinedError, equilibrium_residual, solve_eigenstates  # noqa: E402
from .dynamics import HydroState, evolve_nonrel, evolve_trajectory  # noqa: E402
from .vacuum_noise import NoiseSpec, ResolutionError, sample_ensemble, sample_field  # noqa: E402
from .blackhole import (  # noqa: E402
    CN_MINUS_INFINITY,
    BlackHoleScenario,
    HorizonError,
    critical_mass_by_search,
    is_black_hole,
    min_mass,
)

__all__ = [name for name in dir() if not name.startswith("_")]
