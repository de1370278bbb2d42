"""capamp: private-state induced channels, coherent-information bounds, and
capacity-amplification thresholds at desk scale."""

from .errors import (
    CapampError,
    DimensionCap,
    DimensionMismatch,
    InfeasibleParams,
    InvalidSpec,
    NotAChannel,
    NotAState,
    NotHermitian,
    NotOrthogonal,
)
from .matcore import (
    binary_entropy,
    eig_hermitian,
    kron,
    operator_norm,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    purify,
    trace_norm,
    von_neumann_entropy,
)
from .states import (
    CcqState,
    DensityOperator,
    PbitSpec,
    is_perfect_pdit,
    is_secure,
    key_ccq,
    max_entangled,
    pbit_from_spec,
    ppt_approx_pbit,
    ppt_min_eigenvalue,
    sym_asym_pbit,
    sym_asym_pbit_spec,
    sym_asym_projectors,
)
from .channels import (
    Channel,
    apply,
    channel_from_choi,
    choi,
    complementary,
    compose,
    depolarizing_channel,
    direct_sum,
    erasure_channel,
    erasure_channel_flagged,
    flagged,
    identity_channel,
    private_channel,
    replacement_channel,
    tensor,
    unnormalized_choi,
)
from .capacity import (
    Ensemble,
    OptimizerConfig,
    amplification_lower_bound,
    coherent_info,
    coherent_info_state,
    holevo,
    multi_copy_ansatz_value,
    private_info,
    q1_ansatz_value,
    q1_optimize,
    sym_asym_images,
)
from .bounds import (
    BetaWitness,
    TranspositionWitness,
    depolarizing_upper,
    diamond_upper_via_choi,
    erasure_capacity,
    privacy_quantum_tradeoff,
    private_channel_beta_witness,
    private_channel_transposition_witness,
    transposition_bound_closed,
    transposition_bound_general,
    verify_beta_witness,
    verify_transposition_witness,
)
from .thresholds import (
    ApproxPrivateParams,
    SweepGrid,
    additivity_lambda,
    approx_private_lower_bound,
    depol_margin,
    erasure_margin,
    flag_additivity_margin,
    min_amplification_dimension,
    n_copy_lower_bound,
    separation_lower_bound,
    superactivation_N_threshold,
    superactivation_plan,
    sweep,
)

__version__ = "0.1.0"
