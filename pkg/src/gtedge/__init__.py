"""Edge asymptotics of uniform random discrete interlaced particle arrays.

The package computes exact correlation kernels of the uniform measure on
integer arrays with a fixed top row, parameterizes the asymptotic edge curve
of the associated limit shape, and demonstrates numerically that the rescaled
kernel converges to the extended Airy kernel at typical edge points.
"""

from .airy import (
    ARGUMENT_SIGNS,
    AiryQuery,
    TolNotMet,
    airy_classical_oracle,
    airy_extended,
    airy_lambda_form,
    airy_tilde,
    calibrate_argument_signs,
    cubic_completion,
    gaussian_phi,
)
from .cauchy_edge import (
    AssumptionViolated,
    DegenerateEdge,
    EdgePoint,
    EpsViolation,
    IntervalLt,
    NotTypical,
    OnSupport,
    OnSupportS,
    TOnSupport,
    cauchy,
    cauchy_derivative,
    cauchy_ext,
    classify_case,
    discrete_cauchy_all,
    edge_nonasymptotic,
    edge_point,
    f_derivatives,
    liquid_region_test,
    locate_Lt,
)
from .cli_harness import ExperimentConfig, hexagon_top_row, main
from .kernel_exact import (
    Degenerate,
    DomainViolation,
    KernelValue,
    alpha_n,
    conj_Atn,
    conj_Bn,
    conj_Bn_exact,
    kernel_Kn,
    kernel_equiv,
    phi_exact,
    rescaled_kernel,
)
from .measures import (
    DiscreteMeasure,
    InvalidDensity,
    LimitMeasure,
    MassNotOne,
    OutOfPolygon,
    ParticleConfig,
    RegionTag,
    SupportTooNarrow,
    SupportTriple,
    classify_t,
    default_eps,
    discretize,
    make_limit_measure,
    make_mu_n,
    read_measure_file,
    region_interval,
    support_sets,
)
from .numerics import (
    BoundaryZero,
    DepthExceeded,
    NoConvergence,
    SignedLog,
    Tolerance,
    count_roots,
    integrate_path,
    refine_root,
    signed_log_sum,
    signed_logsumexp,
)
from .saddle_scaling import (
    DegenerateThirdDerivative,
    OnDiscreteSupport,
    OutOfLattice,
    PoleHit,
    QueryPair,
    ScalingContext,
    WrongRootCount,
    build_scaling,
    exact_exp_nFn,
    fn_eval,
    fn_eval_mean,
    particle_sequence,
    saddle_roots,
)
from .sampler import (
    BudgetExceeded,
    GTPattern,
    empirical_correlations,
    enumerate_patterns,
    glauber_chain,
    glauber_sample,
    maximal_pattern,
    minimal_pattern,
    pattern_count,
    sample_patterns,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
