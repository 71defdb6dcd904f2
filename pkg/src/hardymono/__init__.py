"""Hardy-operator computations in the log-monomial function algebra.

The package computes exactly with finite sums of (log x)^m x^s on (0, 1]:
closed-form inner products, closed-form application of the Hardy operator
and its adjoint, Laguerre-basis expansions, distances to generalized
finite monomial spaces, Pick-matrix positivity tests, and the full
pipeline that turns an invariant subspace into a convergent sequence of
finite monomial spaces with diagnostics.
"""

from .context import Context, HALF_PLANE_EDGE, HALF_PLANE_MARGIN
from .errors import (
    BackendError,
    CaseTwoAnomalyError,
    DegenerateKernelError,
    DegenerateSubspaceError,
    DomainError,
    HalfPlaneError,
    HardymonoError,
    IllConditioningError,
    PrecisionEscalationError,
    QuadratureError,
    ReconstructionDomainError,
    SpaceDenseError,
    UnboundedScalingError,
)
from .functions import (
    LogMonomialSum,
    apply_hardy,
    apply_hardy_adjoint,
    inner_product,
    norm,
    norm_sq,
)
from .geometry import (
    ExponentMultiset,
    TruncatedIndicator,
    cauchy_det,
    dist_sq_to_space,
    dist_to_space,
    gram,
    muntz_partial_sums,
    project,
    roots_of_unity_space,
)
from .laguerre import blaschke_shift_apply, laguerre_coeffs, laguerre_fn
from .pick import (
    MomentSequence,
    PickSystem,
    is_psd,
    max_scaling_constant,
    pick_matrix,
)
from .reconstruct import (
    PartialFractionForm,
    RationalFn,
    build_alpha,
    exponent_multiset_from_poles,
    find_roots,
    inverse_laplace_uN,
    partial_fractions_over_splus1,
)
from .pipeline import (
    ApproximationReport,
    PipelineConfig,
    SubspaceSpec,
    TestFunction,
    approximate,
    convergence_diagnostics,
    validate_wandering,
    wandering_vector,
)
from .estimator import MonomialSubspaceApproximator
from .config import Config, load_config

__version__ = "0.1.0"

__all__ = [
    "ApproximationReport",
    "BackendError",
    "CaseTwoAnomalyError",
    "Config",
    "Context",
    "DegenerateKernelError",
    "DegenerateSubspaceError",
    "DomainError",
    "ExponentMultiset",
    "HALF_PLANE_EDGE",
    "HALF_PLANE_MARGIN",
    "HalfPlaneError",
    "HardymonoError",
    "IllConditioningError",
    "LogMonomialSum",
    "MomentSequence",
    "MonomialSubspaceApproximator",
    "PartialFractionForm",
    "PickSystem",
    "PipelineConfig",
    "PrecisionEscalationError",
    "QuadratureError",
    "RationalFn",
    "ReconstructionDomainError",
    "SpaceDenseError",
    "SubspaceSpec",
    "TestFunction",
    "TruncatedIndicator",
    "UnboundedScalingError",
    "apply_hardy",
    "apply_hardy_adjoint",
    "approximate",
    "blaschke_shift_apply",
    "build_alpha",
    "cauchy_det",
    "convergence_diagnostics",
    "dist_sq_to_space",
    "dist_to_space",
    "exponent_multiset_from_poles",
    "find_roots",
    "gram",
    "inner_product",
    "inverse_laplace_uN",
    "is_psd",
    "laguerre_coeffs",
    "laguerre_fn",
    "load_config",
    "max_scaling_constant",
    "muntz_partial_sums",
    "norm",
    "norm_sq",
    "partial_fractions_over_splus1",
    "pick_matrix",
    "project",
    "roots_of_unity_space",
    "validate_wandering",
    "wandering_vector",
]
