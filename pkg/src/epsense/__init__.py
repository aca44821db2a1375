"""Exceptional points and enhanced response in PT-symmetric multi-qubit systems."""
from ._backend import BACKEND
from .ep_analysis import (
    EPDecomposition,
    ResponseFit,
    ep_decomposition,
    fit_loglog_slope,
    gamma_sweep,
    lowest_epsilon_power,
    mbody_bound_audit,
    noncoalescing_states,
    response_sweep,
    special_term,
)
from .errors import ConsistencyError, EpsenseError, FitError, NumericError, PreconditionError
from .floquet import (
    DriveProtocol,
    MagnusResult,
    build_drive_protocol,
    effective_hamiltonian,
    exact_period_propagator,
    floquet_response_sweep,
    magnus_error_scaling,
    magnus_terms,
)
from .pauli import (
    PauliString,
    QubitSystemParams,
    collective_interaction,
    commutator,
    dissipative_shift,
    noninteracting_hamiltonian,
    pauli_string_operator,
)
from .spectral import (
    EpsLinearCharPoly,
    Polynomial,
    SpectrumResult,
    characteristic_polynomial,
    eigendecompose,
    epsilon_linear_term,
    jordan_structure_at_zero,
    matrix_exponential,
    numeric_rank,
    trace_distance,
)
from .spin_sectors import SpinSector, spin_adapted_eigendecompose, spin_sector_blocks

__version__ = "0.1.0"
