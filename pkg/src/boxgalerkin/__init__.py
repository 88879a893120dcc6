"""Galerkin truncations of -d^2/dx^2 on (-1, 1) in arbitrary precision.

Truncated Hamiltonians in eigen, associated-Legendre and Gram-Schmidt
augmented bases, their unitary propagators, and the error between truncated
and exact evolutions of box eigenstates.
"""
from .basis import (
    AugmentKind,
    BasisSpec,
    BoundaryCondition,
    DegenerateBasis,
    StateCoefficients,
    UnsupportedPair,
    Wave,
    expand_state,
)
from .evolution import SimTime, exact_phase, propagate_truncated, special_time_map
from .experiment import ExperimentSpec, SweepRow, approximation_error, run_sweep
from .numerics import PrecisionContext
from .operator import (
    SingularTruncation,
    TruncatedHamiltonian,
    galerkin_projection_residual,
    raw_matrix_element,
    truncated_hamiltonian,
)

__version__ = "0.1.0"
