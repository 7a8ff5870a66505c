"""Entanglement dynamics of two cavity modes in squeezed-vacuum reservoirs."""

__version__ = "0.1.0"

from .errors import BasisMismatch, DegenerateSteadyState, NumericalFailure, UnphysicalParameters
from .fock import DensityMatrix, Family, InitialStateSpec, Mode, ModeBasis, build_initial_state
from .lindblad import ReservoirSpec, Topology, liouvillian, liouvillian_single_mode
from .measures import concurrence_wootters, concurrence_x_state, log_negativity
from .propagate import evolve_expm, evolve_rk4, propagate_expm, steady_state

__all__ = [
    "__version__",
    "BasisMismatch",
    "DegenerateSteadyState",
    "NumericalFailure",
    "UnphysicalParameters",
    "DensityMatrix",
    "Family",
    "InitialStateSpec",
    "Mode",
    "ModeBasis",
    "build_initial_state",
    "ReservoirSpec",
    "Topology",
    "liouvillian",
    "liouvillian_single_mode",
    "concurrence_wootters",
    "concurrence_x_state",
    "log_negativity",
    "evolve_expm",
    "evolve_rk4",
    "propagate_expm",
    "steady_state",
]
