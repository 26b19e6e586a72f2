"""Support areas, equilibrium regions and pendulum-mode ZMP/COM trajectories
for frictional multi-contact scenes."""

from .contacts import (
    ContactPoint,
    ContactScene,
    ContactSurface,
    coulomb_check,
    cwc_span,
    grasp_matrix,
    linearize_friction,
    surface_to_points,
)
from .geom import Polygon2, VirtualPlane, convex_hull_2d, minkowski_difference, plane_basis
from .pendulum import (
    PendulumMode,
    TrajProblem,
    TrajectorySolution,
    com_zmp_relation,
    discretize,
    generate_trajectory,
    integrate_com,
    make_mode,
    plan_stance_transition,
)
from .polyhedra import (
    HRep,
    KERNEL_BACKEND,
    VRep,
    brute_force_vertices,
    dd_hrep_to_vrep,
    reduce_equalities,
    vrep_to_hrep,
)
from .support_areas import (
    Cone2,
    NmpVolume,
    SupportArea,
    area_vertices,
    choose_polygonal_normal,
    full_support_area,
    full_support_area_cwc,
    nmp_support_volume,
    pendular_support_area_dd,
    pendular_support_area_rayshoot,
    static_equilibrium_polygon,
    zmp_from_wrench,
    zmp_lpm_feasible,
)

__version__ = "0.1.0"
