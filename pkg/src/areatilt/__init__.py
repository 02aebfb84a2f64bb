"""Ordered random paths above a hard wall under geometric area tilts:
heat-bath sampling, spectral partition functions, and identity checks."""

from .ensemble import (
    BoundaryData,
    DiscretePathEnsemble,
    FloorCeiling,
    PathEnsemble,
    TiltedEnsembleSpec,
    compute_area,
    log_weight,
    rescale_ensemble,
    shift_ensemble,
)
from .errors import (
    ConfigError,
    CouplingBrokenError,
    DimensionError,
    DomainError,
    InfeasibleError,
    InvalidStateError,
    StepSizeError,
)
from .heatbath import (
    ChainSamples,
    ChainState,
    HeatBathKernel,
    boundary_prob,
    coupled_step,
    interior_prob,
    make_coupling,
    maximal_config,
    minimal_config,
    run_chain,
    run_coupled,
    run_ordered_chains,
    step,
)
from .spectral import (
    AirySpectrum,
    KernelEvaluation,
    airy_ai,
    airy_zero,
    eigenfunction,
    heat_kernel,
    kernel_row_integral,
    partition_asymptotic,
    pde_oracle,
    total_partition,
)
from .stats import (
    CurvedProfile,
    EmpiricalSummary,
    KsResult,
    TailSlopeResult,
    batch_stderr,
    curved_max,
    effective_count,
    fs_reference_cdf,
    fs_reference_mean,
    integrated_autocorr,
    ks_distance,
    plain_max,
    tail_slope,
    top_marginal,
)
from .verify import (
    VerificationReport,
    check_cascade,
    check_confinement,
    check_domination,
    check_fs_limit,
    check_max_recursion,
    check_scaling,
    check_spectral,
    sample_statistic,
    sample_statistics,
    single_path_growth,
)

__version__ = "0.1.0"
