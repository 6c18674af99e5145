"""Quantifying the barrier-parameter degradation under convexification.

The pipeline: 1D derivative calculus and admissibility checks
(:mod:`~barriergap.calculus`), the 3D body family P(nu) and its sampling
(:mod:`~barriergap.body`), convex hulls and the minimal enclosing
parameter curve (:mod:`~barriergap.relaxation`), and a deterministic CLI
(:mod:`~barriergap.cli`).
"""

from .body import (
    BodyPoint,
    FeasibleRegion,
    Grid2D,
    Slab,
    SurfaceSample,
    contains,
    contains_mask,
    feasible_region,
    nesting_check,
    region_contains,
    region_mask,
    sample_surface,
    x3_slab,
)
from .calculus import (
    MEMBERSHIP_TOL,
    BarrierOracle,
    DerivativeTriple,
    EnvelopeInitialData,
    NormalizedTriple,
    Violation,
    admissibility_report,
    envelope_ode_residual,
    envelope_p,
    f_range_bounds,
    gamma_of_nu,
    hilbert_distance,
    normalization_residuals,
    normalize_triple,
    nu_of_gamma,
    p_range_bounds,
    pointwise_feasible,
    symmetric_log_barrier,
    weighted_log_barrier,
)
from .errors import (
    BarrierGapError,
    CapExceededError,
    CurvatureError,
    DegenerateHullError,
    DomainError,
    EnvelopeBlowupError,
    RegionError,
    TabularFormatError,
)
from .hull import HullMesh, HullSlab, convex_hull_3d, hull_slab, hull_slab_many
from .relaxation import (
    ConvergenceReport,
    NuTildeCurve,
    analytic_lower_bound,
    convergence_study,
    nu_tilde,
    nu_tilde_at,
    sweep,
    tangency_certificate,
)

__version__ = "0.1.0"
