"""warpstab: curvature and stability checks for weighted minimal slices
of warped-product model geometries.

The package computes Bakry-Emery curvature, slice extrinsic geometry,
first/second variations of weighted area, stability spectra, normal-flow
monotonicity and weighted comparison bounds, each paired with an
independent numerical oracle.
"""

from .asymptotics import (
    ComparisonReport,
    DecayFit,
    GrowthCheck,
    RadialMeasureModel,
    ball_volume,
    cutoff_energy,
    decay_fit,
    polynomial_growth_check,
    sphere_area_ratio,
    unit_sphere_area,
)
from .conformal import (
    ConformalProbe,
    HessianGap,
    annulus_min_ricci,
    conformal_christoffel_check,
    conformal_hessian_gap,
    conformal_ricci,
    distance_function_bound,
)
from .curvature import (
    CurvatureReport,
    closed_form_curvature,
    curvature_rows,
    fd_oracle_curvature,
    fd_tensors,
)
from .errors import (
    ConfigError,
    DomainError,
    NumericalContractError,
    PreconditionError,
    QuadratureError,
    StepUnderflowError,
    WarpstabError,
)
from .expr import (
    Expr,
    ExprDomainError,
    ExprSyntaxError,
    differentiate,
    evaluate,
    parse,
    render,
    simplify,
)
from .flow import FlowTrace, MonotonicityReport, evolve, monotonicity_report, riccati_identity_residual
from .quadrature import QuadratureSpec
from .slices import RootScan, SliceShape, f_minimal_roots, gauss_identity_check, slice_shape
from .space import WarpedSpace, s_kappa
from .variation import (
    RadialProfile,
    SpectralResult,
    first_variation,
    second_variation_fd,
    second_variation_form,
    stability_spectrum,
    weighted_area,
)

__version__ = "0.1.0"
