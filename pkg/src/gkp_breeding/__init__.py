"""Heralded breeding of grid (GKP) states in a truncated Fock space, with
exact Gaussian-formalism oracles for every Gaussian stage.
"""

from .errors import (
    GkpError,
    NumericError,
    ParameterWarning,
    SeedNotRequired,
    TruncationWarning,
    ValidationError,
)
from .fock import (
    FockOperator,
    FockState,
    Moments,
    TruncationPolicy,
    TwoModeOperator,
    TwoModeState,
    apply,
    apply_two_mode,
    basis_state,
    fidelity,
    hermite_functions,
    identity_op,
    inner,
    is_unitary_interior,
    ladder_ops,
    moments,
    momentum_wavefunction,
    number_op,
    op_exp,
    position_wavefunction,
    project_ancilla,
    quadrature_ops,
    tensor,
    vacuum_state,
)
from .gaussian import (
    GateSpec,
    GaussianState,
    PrecisionMatrix,
    binomial_gaussian,
    cat_fidelity,
    closed_form_pmax,
    closed_form_pn,
    delta_c,
    evolve,
    herald_t_linear,
    herald_t_quadratic,
    precision_after_bs,
    precision_after_qnd,
    symplectic_form,
    symplectic_of,
    vacuum,
)
from .breeding import (
    DampingSpec,
    SeedSpec,
    StepParams,
    apply_beamsplitter,
    apply_qnd,
    apply_single_mode,
    beamsplitter_unitary,
    bifurcate,
    build_seed,
    damping_circuit_op,
    damping_circuit_params,
    damping_op,
    damping_strength,
    displaced_squeezed,
    gaussian_unitary,
    kraus_gps,
    kraus_igps,
    qnd_unitary,
    seed_params,
    seed_target,
    solve_step_params,
    squeezed_vacuum,
)
from .targets import (
    DampingResult,
    FitResult,
    GkpTarget,
    GridSpec,
    WignerGrid,
    codeword,
    db_to_delta,
    fit_effective_squeezing,
    fit_two_parameter,
    logical_flip,
    optimize_envelope_damping,
    qubit_target,
    squeezing_db,
    target_state,
    wigner,
)
from .pipeline import (
    PipelineConfig,
    PipelineResult,
    RowReport,
    StepRecord,
    TABLE_ROWS,
    TableRow,
    config_from_dict,
    config_to_dict,
    load_config,
    load_results,
    reproduce_table1,
    run_pipeline,
    run_table_row,
    write_config,
    write_results,
    write_wigner_csv,
)

__version__ = "0.1.0"
