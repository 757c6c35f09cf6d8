"""Exact calculus for persistence modules over a convex polyhedral cone.

Everything is computed over the rationals or a prime field; no floats
enter any decision.  The main objects are cell complexes cut by
axis-aligned rational breakpoints (in cone coordinates), persistence
modules on them, their corner stabilizations, and exact interleaving
and convolution distances with certified witnesses.
"""

from .cone import ConeSpec, GaugeSpec, LinearMapReport, PolySet, is_gamma_proper, linear_map_compatible
from .exactla import Diagram, FieldMat, SolutionSpace, affine_solution_space
from .arrangement import AxisGrid, CellComplex, common_refinement, orthant_transform, shift_complex
from .persist import (
    ArrModule,
    ModMorphism,
    direct_sum,
    identity_morphism,
    point_module,
    pointwise_cokernel,
    pointwise_image,
    pointwise_kernel,
    principal_module,
    random_module,
    random_morphism,
    restrict_module,
    shift_module,
    smoothing,
    zero_module,
    zero_morphism,
)
from .sites import (
    ExactnessReport,
    GammaModule,
    OpenPiece,
    OpenSet,
    alpha_star,
    alpha_star_morphism,
    alpha_t,
    beta_inv,
    beta_inv_morphism,
    beta_star,
    beta_star_morphism,
    beta_t,
    exactness_probe,
    is_ephemeral,
    open_contains,
    open_equal,
    open_intersect,
    open_union,
    random_gamma_module,
    strict_restrictions_vanish,
)
from .interleave import (
    BudgetExceededError,
    DistanceResult,
    InterleavingWitness,
    IsometryRecord,
    interleaving_distance,
    is_interleaved,
    isometry_check,
    zero_interleaving_criterion,
)
from .conv1d import (
    ConvIntRecord,
    HomPattern,
    RaySheaf,
    antipodal_convolution_support,
    compare_with_interleaving,
    convolution_distance,
    convolve_ball,
    gamma_fixed_check,
    is_c_isomorphic,
    line_cone,
    properness_report,
    to_gamma_module,
)
from .docio import DocumentError, document_for, load_document, object_from_document, save_document

__version__ = "1.0.0"

__all__ = [
    "ArrModule",
    "AxisGrid",
    "BudgetExceededError",
    "CellComplex",
    "ConeSpec",
    "ConvIntRecord",
    "Diagram",
    "DistanceResult",
    "DocumentError",
    "ExactnessReport",
    "FieldMat",
    "GammaModule",
    "GaugeSpec",
    "HomPattern",
    "InterleavingWitness",
    "IsometryRecord",
    "LinearMapReport",
    "ModMorphism",
    "OpenPiece",
    "OpenSet",
    "PolySet",
    "RaySheaf",
    "SolutionSpace",
    "affine_solution_space",
    "alpha_star",
    "alpha_star_morphism",
    "alpha_t",
    "antipodal_convolution_support",
    "beta_inv",
    "beta_inv_morphism",
    "beta_star",
    "beta_star_morphism",
    "beta_t",
    "common_refinement",
    "compare_with_interleaving",
    "convolution_distance",
    "convolve_ball",
    "direct_sum",
    "document_for",
    "exactness_probe",
    "gamma_fixed_check",
    "identity_morphism",
    "interleaving_distance",
    "is_c_isomorphic",
    "is_ephemeral",
    "is_gamma_proper",
    "is_interleaved",
    "isometry_check",
    "line_cone",
    "linear_map_compatible",
    "load_document",
    "object_from_document",
    "open_contains",
    "open_equal",
    "open_intersect",
    "open_union",
    "orthant_transform",
    "point_module",
    "pointwise_cokernel",
    "pointwise_image",
    "pointwise_kernel",
    "principal_module",
    "properness_report",
    "random_gamma_module",
    "random_module",
    "random_morphism",
    "restrict_module",
    "save_document",
    "shift_complex",
    "shift_module",
    "smoothing",
    "strict_restrictions_vanish",
    "to_gamma_module",
    "zero_interleaving_criterion",
    "zero_module",
    "zero_morphism",
]
