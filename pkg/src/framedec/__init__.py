"""Frame decompositions of discretized linear operators.

Decomposes bounded linear operators between finite product Hilbert
spaces in terms of frames connected by a per-index coefficient matrix
family, and solves (possibly ill-posed) equations Ax = y through
per-index pseudo-inverses, Picard diagnostics, and regularization
filters.
"""

from .constructors import (
    SobolevScaleSpec,
    StabilityCertificate,
    StabilityConstructionError,
    from_svd,
    l_operator_construct,
    reconstruct_abar,
    stability_construct,
    svd_decomposition_from_matrix,
)
from .decomposition import (
    FrameDecomposition,
    LinearOperatorHandle,
    ReconstructionResult,
    VerificationReport,
    apply_decomposed,
    nullspace_membership,
    picard_diagnostic,
    reconstruct,
    residual_sandwich,
    verify_assumption,
)
from .frames import (
    DualFrame,
    Frame,
    NotAFrameError,
    certify_bounds,
    dual_exact,
    dual_neumann,
)
from .lambdas import BlockPartition, LambdaFamily
from .regularization import (
    FilterSpec,
    NoisyData,
    choose_alpha_discrepancy,
    filtered_reconstruct,
    stability_bound_check,
)
from .spaces import (
    ComponentSpace,
    DimensionMismatch,
    ProductSpaceSpec,
    ProductVector,
    inner_product,
    norm,
)

__version__ = "0.1.0"

__all__ = [
    "ComponentSpace",
    "ProductSpaceSpec",
    "ProductVector",
    "DimensionMismatch",
    "inner_product",
    "norm",
    "Frame",
    "DualFrame",
    "NotAFrameError",
    "certify_bounds",
    "dual_exact",
    "dual_neumann",
    "LambdaFamily",
    "BlockPartition",
    "LinearOperatorHandle",
    "FrameDecomposition",
    "VerificationReport",
    "ReconstructionResult",
    "verify_assumption",
    "apply_decomposed",
    "reconstruct",
    "picard_diagnostic",
    "residual_sandwich",
    "nullspace_membership",
    "SobolevScaleSpec",
    "StabilityCertificate",
    "StabilityConstructionError",
    "from_svd",
    "svd_decomposition_from_matrix",
    "stability_construct",
    "l_operator_construct",
    "reconstruct_abar",
    "FilterSpec",
    "NoisyData",
    "filtered_reconstruct",
    "stability_bound_check",
    "choose_alpha_discrepancy",
]
