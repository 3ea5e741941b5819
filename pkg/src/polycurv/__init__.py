"""Discrete curvature of polygonal curves and triangulated surfaces."""

from ._kernels import backend
from .curvature import EnergyReport, angle_defect, dihedral_angle, energy_report, mean_curvature_energy, relaxed_sequence
from .div_measures import edge_measure, mu_density, sigma_fields, total_mass
from .errors import *  # noqa: F401,F403
from .gauss_sphere import (
    SphericalPolygon,
    convex_quadratic_lift,
    elliptic_identity_check,
    envelope_bound_check,
    geodesic_envelope,
    lhuilier_fan_area,
    spherical_polygon_area,
)
from .lantern import (
    LanternParams,
    PrismParams,
    build_lantern,
    build_prism,
    closed_form_area,
    closed_form_f1,
    closed_form_f2,
    lantern_mean_curvature_consistency,
    lantern_vertex_diagnostics,
    prism_report,
)
from .polyline import (
    PolygonalCurve,
    cantor_polygonal,
    curvature_force,
    curvature_report,
    inscribe_curve,
    polygonal_normal_variation,
    total_curvature,
    turning_angles,
)
from .smoothing import GridField, MollifierSpec, grid_energy_report, mollify, slicing_tc_check, smoothing_convergence_check
from .trisurf import (
    GraphSurface,
    Triangulation2D,
    TriangulatedSurface3D,
    inscribe_graph,
    load_off,
    regular_grid_triangulation,
    save_off,
    vertex_star,
)

__version__ = "0.1.0"
