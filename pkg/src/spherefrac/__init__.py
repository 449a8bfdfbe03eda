"""Fractional perimeters and seminorms on the unit sphere.

Numerical companions to the spherical fractional isoperimetric inequality:
Monte Carlo and quadrature estimators for the s-perimeter, exact circle and
interval formulas, great-circle integral geometry (two-point plane identity,
Crofton crossings), and the extrapolated limits s -> 1, s -> -infinity and
s -> 0^-.
"""

from .estimation import (
    Estimate,
    NonFiniteSampleError,
    QuadratureError,
    RadialProposal,
    RandomStream,
    adaptive_quad,
    as_stream,
    incomplete_beta,
    mc_estimate,
    radial_sample,
)
from .geometry import (
    GreatCircle,
    cap_area,
    circle_distance,
    geodesic_distance,
    normalized_distance,
    sample_at_distance,
    sample_uniform,
    slice_cap_fraction,
    sphere_surface,
    unit_vector,
    volume_radius,
)
from .integral_geometry import (
    BPReport,
    CroftonReport,
    bp_check,
    bp_constant,
    crofton_estimate,
    polytope_boundary_measure,
    sample_plane,
)
from .limits import (
    ComparisonReport,
    LimitReport,
    ProfileReport,
    SweepRow,
    VanishingReport,
    beta_asymptotic_check,
    concentration_constant,
    extrapolate,
    isoperimetric_comparison,
    isoperimetric_profile,
    random_disjoint_cap_pair,
    s_to_zero_vanishing_check,
    sweep_s_to_1,
    sweep_s_to_minus_inf,
    sweep_seminorm_to_minus_inf,
)
from .perimeter import (
    antipodal_concentration_quad,
    interval_perimeter_exact,
    interval_perimeter_localized,
    perimeter_cap,
    perimeter_circle_exact,
    perimeter_mc,
    perimeter_minus_n,
    s_regime,
    seminorm_mc,
    validate_s,
)
from .sets import (
    ArcUnion,
    Cap,
    Complement,
    DegenerateCircleError,
    PolyconvexUnion,
    Polytope,
    Reflection,
    circle_trace,
    crossing_count,
    measure_mc,
    rearrangement,
    symmetric_overlap_measure,
)

__version__ = "0.1.0"

__all__ = [
    "ArcUnion",
    "BPReport",
    "Cap",
    "ComparisonReport",
    "Complement",
    "CroftonReport",
    "DegenerateCircleError",
    "Estimate",
    "GreatCircle",
    "LimitReport",
    "NonFiniteSampleError",
    "PolyconvexUnion",
    "Polytope",
    "ProfileReport",
    "QuadratureError",
    "RadialProposal",
    "RandomStream",
    "Reflection",
    "SweepRow",
    "VanishingReport",
    "adaptive_quad",
    "antipodal_concentration_quad",
    "as_stream",
    "beta_asymptotic_check",
    "bp_check",
    "bp_constant",
    "cap_area",
    "circle_distance",
    "circle_trace",
    "concentration_constant",
    "crofton_estimate",
    "crossing_count",
    "extrapolate",
    "geodesic_distance",
    "incomplete_beta",
    "interval_perimeter_exact",
    "interval_perimeter_localized",
    "isoperimetric_comparison",
    "isoperimetric_profile",
    "mc_estimate",
    "measure_mc",
    "normalized_distance",
    "perimeter_cap",
    "perimeter_circle_exact",
    "perimeter_mc",
    "perimeter_minus_n",
    "polytope_boundary_measure",
    "radial_sample",
    "random_disjoint_cap_pair",
    "rearrangement",
    "s_regime",
    "s_to_zero_vanishing_check",
    "sample_at_distance",
    "sample_plane",
    "sample_uniform",
    "seminorm_mc",
    "slice_cap_fraction",
    "sphere_surface",
    "sweep_s_to_1",
    "sweep_s_to_minus_inf",
    "sweep_seminorm_to_minus_inf",
    "symmetric_overlap_measure",
    "unit_vector",
    "validate_s",
    "volume_radius",
]
