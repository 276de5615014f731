"""Permutation-projection accelerated Markov chain toolkit.

Builds projections (P + Q P* Q) / 2 of transition matrices onto
permutation-twisted self-adjoint sets, runs cyclic alternating projections
with full diagnostics, compares spectral and variance parameters of the
projected kernels, and drives trajectory-level projection samplers on spin
systems.
"""

from .chains import (
    GeneralPermutation,
    InvolutionPermutation,
    ProbabilityVector,
    StochasticMatrix,
    adjoint,
    birth_death_chain,
    conjugate,
    identity_involution,
    involution_from_map,
    is_reversible,
    permutation_matrix,
    probability_vector,
    random_permutation,
    read_matrix,
    stationary_matrix,
    stationary_of,
    uniform,
    validate_stochastic,
    write_matrix,
)
from .divergence import (
    DivergenceValue,
    deformed_kl_left,
    deformed_kl_right,
    dobrushin_lower_bound,
    dobrushin_ratio,
    frobenius_dist,
    frobenius_inner,
    frobenius_norm,
    kl_rate,
    random_stationary_pair,
    tv_weighted,
)
from .landscape import (
    CriticalHeightReport,
    Landscape,
    arrhenius_slope,
    arrhenius_table,
    bimodal_instance,
    bottleneck_matrix,
    critical_height,
    gibbs,
    make_landscape,
    mh_kernel,
    support_of,
)
from .projection import (
    MixWeight,
    ProjectionRun,
    ProjectionSchedule,
    SubspaceAngle,
    alternating_projections,
    project,
    project_alpha,
    rate_certificate,
    schedule,
    speed_limit_report,
    structure_fit_uniform,
    subspace_angle,
    trace_shift,
    transposition_schedule,
)
from .spectral import (
    FundamentalMatrix,
    SpectrumReport,
    asymptotic_variance,
    average_case_av,
    fundamental,
    general_eigenvalues,
    mixing_time,
    spectrum,
    variance_report,
    worst_case_av,
)
from .spins import (
    ExperimentConfig,
    GlobalFlip,
    MatrixChain,
    PermutationProgram,
    SpinChain,
    SpinModel,
    TraceRecord,
    delta_h,
    dense_mh_matrix,
    exploratory_build,
    hamiltonian,
    mh_step,
    projected_step,
    recursive_rn_step,
    run_experiment,
    summarize,
    symmetry_involution,
)
from .tuning import (
    AdaptiveState,
    EquiClassIndex,
    adaptive_record,
    assignment_exact,
    assignment_joint_local_search,
    assignment_local_search,
    enumerate_involutions,
    equi_class_index,
    involution_count,
)

__version__ = "0.1.0"
