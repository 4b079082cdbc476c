"""Discrete Wigner phase space for odd-prime qudits, and what
measurements with nonnegative Wigner representations can and cannot do
in state discrimination.
"""

from .phase_space import (
    AlgebraReport,
    HermitianOperator,
    PhasePoint,
    QuditDims,
    boost_shift,
    is_odd_prime,
    phase_point_operator,
    phase_point_operators,
    phase_points,
    point_spectrum_multiplicities,
    verify_phase_point_algebra,
    weyl_operator,
)
from .states import (
    DensityOperator,
    PureState,
    enumerate_stabilizer_states,
    example_d5_pair,
    example_d5_vectors,
    k_state,
    mub_bases,
    norell_state,
    origin_eigenbasis,
    orthogonal_complement,
    random_density_operator,
    random_pure_state,
    state_from_json,
    state_to_json,
    strange_state,
    tensor_power,
    tensor_product,
    uniform_mixture,
)
from .wigner import (
    NegativityReport,
    WignerRepresentation,
    is_pwf,
    negativity_report,
    outcome_probability,
    wigner_of,
    write_wigner_csv,
)
from .sdp import (
    MatrixVar,
    Objective,
    SdpOutcome,
    SdpProblem,
    SolveSettings,
    SolverFailure,
    VectorVar,
    embed_complex,
    high_accuracy_settings,
    linear_rows,
    matrix_expr,
    problem_to_json,
    solve,
)
from .subspaces import (
    ExtendibilityCertificate,
    InconclusiveVerdict,
    Subspace,
    certificate_to_json,
    certify_strong_unextendibility,
    is_pwf_unextendible,
    max_min_wigner_over,
    stabilizer_basis_extendibility,
)
from .discrimination import (
    DiscriminationInstance,
    DualCertificate,
    PovmPair,
    data_hiding_ratio,
    distinguishability_norms,
    helstrom_error,
    magic_assisted_min_error,
    min_error_dual_pwf,
    min_error_pwf,
    min_error_record,
    pwf_robustness_of_optimal_measurement,
    robustness_experiment,
    strange_pair_analytic_optimum,
    strange_pair_instance,
    unambiguous_pwf_feasible,
)

__version__ = "0.1.0"
