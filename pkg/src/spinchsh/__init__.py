"""spinchsh: maximal CHSH expectation under spin-s measurements.

Builds the spin correlation matrix of a two-qudit state, reads off the
maximal CHSH value from its two largest singular values and reconstructs
measurement directions that attain it.
"""

from spinchsh.config import DEFAULT_TOLERANCES, Tolerances
from spinchsh.engine import (
    ChshReport,
    MeasurementSettings,
    Route,
    SpinCorrelationMatrix,
    analyze_state,
    bilinear_chsh,
    chsh_expectation,
    chsh_expectation_trace,
    chsh_operator,
    chsh_parameter,
    correlation_by_route,
    max_chsh,
    optimal_settings,
    spin_correlation_from_coefficients,
    spin_correlation_matrix,
    spin_correlation_via_basis,
)
from spinchsh.errors import (
    DegenerateStateError,
    InvalidDimensionError,
    InvalidDirectionError,
    InvalidStateError,
    NotPureError,
    NumericalInconsistencyError,
    PreconditionError,
    SpinChshError,
    StateFileError,
)
from spinchsh.families import (
    SchmidtSpectrum,
    WernerParameter,
    build_family,
    concurrence_pure,
    ghz_closed_form,
    ghz_state,
    horodecki_parameter,
    product_state,
    product_state_closed_form,
    random_mixed_state,
    random_pure_state,
    schmidt_closed_form,
    schmidt_state,
    two_term_closed_form,
    two_term_state,
    werner_closed_form,
    werner_state,
)
from spinchsh.gellmann import (
    GellMannBasis,
    bloch_vectors_of_spin,
    gellmann_basis,
    general_correlation_matrix,
    zs_via_theorem2,
)
from spinchsh.oracle import (
    OracleConfig,
    OracleResult,
    alternating_ascent,
    grid_search,
    verify_theorem1,
)
from spinchsh.qudit import (
    QuantumState,
    SpinOperators,
    density_state,
    make_spin_components,
    partial_trace,
    pure_state,
    spin_projection,
    state_coefficients,
)
from spinchsh.records import AnalysisRecord, read_state_file, write_state_file
from spinchsh.telemetry import configure_tracing, traced

__all__ = [
    # Setup
    "configure_tracing",
    "traced",
    "Tolerances",
    "DEFAULT_TOLERANCES",
    # Operators and states
    "SpinOperators",
    "make_spin_components",
    "spin_projection",
    "QuantumState",
    "density_state",
    "pure_state",
    "partial_trace",
    "state_coefficients",
    # Correlation matrices
    "SpinCorrelationMatrix",
    "spin_correlation_matrix",
    "spin_correlation_from_coefficients",
    "spin_correlation_via_basis",
    "correlation_by_route",
    "GellMannBasis",
    "gellmann_basis",
    "bloch_vectors_of_spin",
    "general_correlation_matrix",
    "zs_via_theorem2",
    # CHSH maximization
    "Route",
    "ChshReport",
    "MeasurementSettings",
    "max_chsh",
    "chsh_parameter",
    "optimal_settings",
    "chsh_operator",
    "bilinear_chsh",
    "chsh_expectation",
    "chsh_expectation_trace",
    "analyze_state",
    # Families
    "ghz_state",
    "ghz_closed_form",
    "SchmidtSpectrum",
    "schmidt_state",
    "schmidt_closed_form",
    "two_term_state",
    "two_term_closed_form",
    "product_state",
    "product_state_closed_form",
    "WernerParameter",
    "werner_state",
    "werner_closed_form",
    "concurrence_pure",
    "horodecki_parameter",
    "random_pure_state",
    "random_mixed_state",
    "build_family",
    # Oracle
    "OracleConfig",
    "OracleResult",
    "alternating_ascent",
    "grid_search",
    "verify_theorem1",
    # Records
    "AnalysisRecord",
    "read_state_file",
    "write_state_file",
    # Errors
    "SpinChshError",
    "InvalidDimensionError",
    "InvalidDirectionError",
    "DegenerateStateError",
    "InvalidStateError",
    "NumericalInconsistencyError",
    "NotPureError",
    "PreconditionError",
    "StateFileError",
]
