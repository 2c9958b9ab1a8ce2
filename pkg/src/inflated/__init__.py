"""Profiles of inflated convex surfaces along planar symmetry lines.

The curvature of a profile solves ``k k''' - k' k'' + k^3 k' = 0``. This
package solves that equation (by ODE integration and by its implicit
quadrature form), rebuilds planar curves from the curvature, checks the
mylar balloon against Paulsen's closed form, evaluates the surface
identities along symmetry lines and assembles closed cross-sections.
"""

from .assembly import (
    ArcSpec,
    CrossSection,
    SweepRow,
    assemble_cross_section,
    build_arc,
    equator_curvature,
    family_coordinate,
    family_params,
    pole_corner_angle,
    shoot_for_pole_angle,
    shoot_nu,
    shoot_nu_for_pole_curvature,
    sweep_family,
)
from .curvegeom import (
    ClosureReport,
    PlanarCurve,
    Pose,
    arclength_of_graph,
    closure_report,
    curvature_from_graph,
    reconstruct_from_curvature,
    total_turning,
)
from .errors import InflatedError
from .mylar import (
    flat_radius,
    mylar_report,
    mylar_thickness,
    mylar_volume,
    paulsen_height,
    verify_mylar_end_to_end,
)
from .numerics import DEFAULT_TOL, Tolerances
from .profile_ode import (
    CurvatureState,
    ProfileParams,
    Trajectory,
    conserved_Q,
    double_zero_params,
    implicit_double_zero,
    implicit_state,
    implicit_time_of_k,
    invert_implicit,
    ode_residual,
    params_from_state,
    rescale_solution,
    solve_ivp,
)
from .symmetry_system import (
    ResidualReport,
    SymmetryLineData,
    residuals,
    second_curvature,
    transverse_factor,
)

__version__ = "0.1.0"

__all__ = [
    "ArcSpec", "ClosureReport", "CrossSection", "CurvatureState", "DEFAULT_TOL",
    "InflatedError", "PlanarCurve", "Pose", "ProfileParams", "ResidualReport", "SweepRow",
    "SymmetryLineData", "Tolerances", "Trajectory", "arclength_of_graph",
    "assemble_cross_section", "build_arc", "closure_report", "conserved_Q",
    "curvature_from_graph", "double_zero_params", "equator_curvature", "family_coordinate",
    "family_params", "flat_radius", "implicit_double_zero", "implicit_state",
    "implicit_time_of_k", "invert_implicit", "mylar_report", "mylar_thickness", "mylar_volume",
    "ode_residual", "params_from_state", "paulsen_height", "pole_corner_angle",
    "reconstruct_from_curvature", "rescale_solution", "residuals", "second_curvature",
    "shoot_for_pole_angle", "shoot_nu", "shoot_nu_for_pole_curvature", "solve_ivp",
    "sweep_family", "total_turning", "transverse_factor", "verify_mylar_end_to_end",
]
