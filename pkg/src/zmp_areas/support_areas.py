"""Support-area constructions: full area, static-equilibrium polygon, pendular
area (double description and ray shooting), and the 3D moment-point volume.

The full area comes from a purely geometric construction: project every
friction-pyramid ray onto the virtual plane, split the projected points by
the sign of their virtual pressure (normal . force), and either hull them
(single sign) or build the union of two polygonal cones on the Minkowski
difference of the positive- and negative-pressure polygons. The pendular
and static regions are affine images of the polytope of stacked contact
forces cut by the pendulum-mode (resp. equilibrium) equalities.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .contacts import cwc_span, grasp_matrix, linearize_friction, stacked_friction_faces
from .errors import (
    DegeneratePlane,
    EmptyArea,
    EmptyPolygon,
    InconsistentEqualities,
    NormalDegenerate,
    UnboundedDirection,
    UnboundedRegion,
    ZmpSingularity,
)
from .geom import (
    Polygon2,
    box_polygon,
    clip_convex,
    convex_hull_2d,
    dual_cone,
    minkowski_difference,
)
from .polyhedra import HRep, VRep, dd_hrep_to_vrep, vrep_to_hrep
from .solvers import LpProblem, solve_lp

PRESSURE_TOL = 1e-9
EZ = np.array([0.0, 0.0, 1.0])


def _classify_span(dirs, atol=1e-9):
    """Classify the cone of 2D directions: pointed, halfplane or plane."""
    if len(dirs) == 0:
        return "degenerate"
    ang = np.sort(np.arctan2(dirs[:, 1], dirs[:, 0]))
    gaps = np.diff(np.append(ang, ang[0] + 2.0 * np.pi))
    gmax = gaps.max()
    if gmax > np.pi + atol:
        return "pointed"
    if gmax > np.pi - atol:
        return "halfplane"
    return "plane"


@dataclass(frozen=True)
class Cone2:
    """Polygonal cone: apex polygon plus nonnegative combinations of rays."""

    apex: Polygon2
    ray_directions: np.ndarray
    span: str

    def __post_init__(self):
        object.__setattr__(
            self, "ray_directions",
            np.asarray(self.ray_directions, dtype=float).reshape(-1, 2),
        )

    @cached_property
    def _hrep(self):
        return vrep_to_hrep(VRep(self.apex.vertices, self.ray_directions))

    def contains(self, p, margin=0.0, tol=1e-9):
        p = np.asarray(p, dtype=float)
        h = self._hrep
        ok = True
        if len(h.a):
            ok = bool(np.all(h.a @ p <= h.b - margin + tol))
        if ok and h.n_eq:
            ok = bool(np.all(np.abs(h.a_eq @ p - h.b_eq) <= tol))
        return ok

    def clip(self, bound):
        """Intersection with the square [-bound, bound]^2, as a polygon."""
        h = self._hrep
        box = np.vstack([np.eye(2), -np.eye(2)])
        a = np.vstack([h.a, box]) if len(h.a) else box
        b = np.concatenate([h.b, np.full(4, float(bound))])
        vr = dd_hrep_to_vrep(HRep(a, b, h.a_eq, h.b_eq))
        if len(vr.vertices) == 0:
            return Polygon2(np.zeros((0, 2)))
        return convex_hull_2d(vr.vertices)


@dataclass(frozen=True)
class SupportArea:
    """Region of the virtual plane; kind selects which fields are set.

    kind == "polygon":     polygon
    kind == "two_cones":   cone_plus, cone_minus (their union is the area)
    kind == "cone":        cone_plus (single convex cone, pendular case)
    kind == "whole_plane": no geometry fields
    """

    plane: object
    kind: str
    polygon: Polygon2 = None
    cone_plus: Cone2 = None
    cone_minus: Cone2 = None
    near_degenerate: bool = False

    def contains(self, p, margin=0.0, tol=1e-9):
        if self.kind == "whole_plane":
            return True
        if self.kind == "polygon":
            return self.polygon.contains(p, margin=margin, tol=tol)
        if self.kind == "cone":
            return self.cone_plus.contains(p, margin=margin, tol=tol)
        return self.cone_plus.contains(p, margin=margin, tol=tol) or self.cone_minus.contains(
            p, margin=margin, tol=tol
        )

    def clipped_polygons(self, bound=50.0):
        """Area clipped to [-bound, bound]^2: one polygon per component."""
        if self.kind == "whole_plane":
            return [box_polygon(bound)]
        if self.kind == "polygon":
            return [clip_convex(self.polygon, box_polygon(bound))]
        if self.kind == "cone":
            return [self.cone_plus.clip(bound)]
        return [self.cone_plus.clip(bound), self.cone_minus.clip(bound)]


@dataclass(frozen=True)
class AreaVertex:
    """Friction-ray / virtual-plane intersection with its virtual pressure."""

    point_plane: np.ndarray
    point_world: np.ndarray
    pressure: float
    generator: int


def zmp_from_wrench(force, moment, plane, ref_point=(0.0, 0.0, 0.0)):
    """ZMP of a wrench (moment taken at ref_point) in the virtual plane.

    Raises ZmpSingularity when the force is orthogonal to the plane normal,
    in which case no finite ZMP exists.
    """
    f = np.asarray(force, dtype=float).reshape(3)
    tau = np.asarray(moment, dtype=float).reshape(3)
    ref = np.asarray(ref_point, dtype=float).reshape(3)
    n = plane.normal
    nf = float(n @ f)
    if abs(nf) <= PRESSURE_TOL:
        raise ZmpSingularity(f"normal . force = {nf:.3e}")
    world = ref + (np.cross(n, tau) + (plane.d_z - n @ ref) * f) / nf
    return plane.to_plane(world)


def area_vertices(generators, plane, pressure_tol=PRESSURE_TOL):
    """Project every wrench generator onto the plane along its own force ray."""
    n = plane.normal
    pressures = generators.pressures(n)
    if np.any(np.abs(pressures) <= pressure_tol):
        raise NormalDegenerate("a wrench generator has zero virtual pressure")
    apps = generators.application_points
    heights = apps @ n
    world = apps + ((plane.d_z - heights) / pressures)[:, None] * generators.forces
    plane_pts = plane.to_plane(world)
    return [
        AreaVertex(plane_pts[i], world[i], float(pressures[i]), i)
        for i in range(len(pressures))
    ]


def support_area_from_projections(points, pressures, plane, area_tol=1e-9):
    """Assemble a SupportArea from projected points and their pressure signs.

    Single-signed pressures give the convex hull; mixed signs give the union
    of two polygonal cones whose ray set comes from the vertices of the
    Minkowski difference of the positive- and negative-pressure polygons.
    When those polygons overlap with interior, the area is the whole plane.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    pressures = np.asarray(pressures, dtype=float).reshape(-1)
    pos = pressures > 0.0
    neg = pressures < 0.0
    if not neg.any() or not pos.any():
        return SupportArea(plane, "polygon", polygon=convex_hull_2d(points))
    poly_pos = convex_hull_2d(points[pos])
    poly_neg = convex_hull_2d(points[neg])
    overlap = clip_convex(poly_pos, poly_neg) if poly_pos.kind == "polygon" and poly_neg.kind == "polygon" else Polygon2(np.zeros((0, 2)))
    if overlap.area() > area_tol:
        return SupportArea(plane, "whole_plane")
    diff = minkowski_difference(poly_pos, poly_neg)
    norms = np.linalg.norm(diff.vertices, axis=1)
    near = bool(np.any(norms <= 1e-9)) or len(overlap.vertices) > 0
    dirs = diff.vertices[norms > 1e-9] / norms[norms > 1e-9, None]
    seen, kept = set(), []
    for d in dirs:
        key = (np.round(d, 9) + 0.0).tobytes()
        if key not in seen:
            seen.add(key)
            kept.append(d)
    dirs = np.array(kept).reshape(-1, 2)
    span = _classify_span(dirs)
    if span == "plane":
        return SupportArea(plane, "whole_plane", near_degenerate=True)
    return SupportArea(
        plane, "two_cones",
        cone_plus=Cone2(poly_pos, dirs, span),
        cone_minus=Cone2(poly_neg, -dirs, span),
        near_degenerate=near,
    )


def full_support_area(scene, plane, sides=4):
    """Geometric construction of the full ZMP support area."""
    gens = cwc_span(scene, sides=sides)
    verts = area_vertices(gens, plane)
    pts = np.array([v.point_plane for v in verts])
    pressures = np.array([v.pressure for v in verts])
    return support_area_from_projections(pts, pressures, plane)


def full_support_area_cwc(scene, plane, sides=4, backend=None):
    """Full area via the 6D wrench cone: span -> facets -> extreme rays -> plane.

    Cross-validation route for the geometric construction; much slower since
    it runs the double description twice in wrench space.
    """
    gens = cwc_span(scene, sides=sides)
    face = vrep_to_hrep(VRep(np.zeros((0, 6)), gens.wrenches), backend=backend)
    back = dd_hrep_to_vrep(face, backend=backend)
    rays6 = back.rays
    n = plane.normal
    pressures = rays6[:, :3] @ n
    if np.any(np.abs(pressures) <= PRESSURE_TOL):
        raise NormalDegenerate("an extreme wrench ray has zero virtual pressure")
    pts = np.array([zmp_from_wrench(w[:3], w[3:], plane) for w in rays6])
    return support_area_from_projections(pts, pressures, plane)


def choose_polygonal_normal(scene, sides=4):
    """Plane normal giving all-positive pressures, or None if forces span 3-space.

    The returned normal is the max-margin interior vector of the dual cone of
    the friction-pyramid rays (an LP); None reproduces the force-spanning
    dichotomy where every normal is degenerate.
    """
    rays = np.vstack([linearize_friction(c, sides) for c in scene.points])
    _, witness = dual_cone(rays)
    return witness


def _require_vertical(scene, plane=None):
    if plane is not None and np.linalg.norm(plane.normal - EZ) > 1e-9:
        raise ValueError("this computation supports a vertical plane normal only")
    g = scene.gravity
    if abs(g[0]) > 1e-12 or abs(g[1]) > 1e-12 or g[2] >= 0.0:
        raise ValueError("this computation requires gravity along -z")


def static_equilibrium_polygon(scene, sides=4, backend=None):
    """Horizontal COM positions admitting valid static contact forces.

    Vertex enumeration of {friction faces, net force = -m g, zero yaw moment}
    mapped through the moment-to-COM relation. Raises EmptyPolygon when no
    equilibrium exists and UnboundedRegion if the image has rays.
    """
    _require_vertical(scene)
    m = scene.mass
    mg = m * abs(scene.gravity[2])
    gmat = grasp_matrix(scene)
    faces = stacked_friction_faces(scene, sides)
    a_w = np.zeros((4, 6))
    a_w[:3, :3] = np.eye(3)
    a_w[3, 3:] = EZ
    b_eq = np.array([0.0, 0.0, mg, 0.0])
    h = HRep(faces, np.zeros(len(faces)), a_w @ gmat, b_eq)
    try:
        vr = dd_hrep_to_vrep(h, backend=backend)
    except InconsistentEqualities as exc:
        raise EmptyPolygon(str(exc)) from exc
    if len(vr.vertices) == 0:
        raise EmptyPolygon("no static equilibrium for this contact set")
    tau = vr.vertices @ gmat[3:].T
    pts = np.column_stack([-tau[:, 1], tau[:, 0]]) / mg
    if len(vr.rays):
        tau_r = vr.rays @ gmat[3:].T
        dirs = np.column_stack([-tau_r[:, 1], tau_r[:, 0]]) / mg
        if np.max(np.linalg.norm(dirs, axis=1), initial=0.0) > 1e-8:
            raise UnboundedRegion("static-equilibrium region is unbounded")
    return convex_hull_2d(pts)


@dataclass(frozen=True)
class LpmSystem:
    """Stacked-force constraint system of the linear pendulum mode."""

    faces: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    proj: np.ndarray      # ZMP xy = offset + proj @ f_all
    offset: np.ndarray


def lpm_system(scene, plane, sides=4):
    """Friction faces + LPM equalities + the affine force-to-ZMP output map.

    The equalities pin the vertical force to m g and the angular momentum
    derivative about the COM to zero, which is the full pendulum-mode
    regulation; the plane normal must be vertical.
    """
    _require_vertical(scene, plane)
    d_g = float(scene.com[2])
    if abs(plane.d_z - d_g) < 1e-6:
        raise DegeneratePlane(f"|d_Z - d_G| = {abs(plane.d_z - d_g):.2e} < 1e-6")
    m = scene.mass
    mg = m * abs(scene.gravity[2])
    gmat = grasp_matrix(scene)
    p_g = scene.com
    a_w = np.zeros((4, 6))
    a_w[0, :3] = EZ
    a_w[1:, :3] = -np.array([
        [0.0, -p_g[2], p_g[1]],
        [p_g[2], 0.0, -p_g[0]],
        [-p_g[1], p_g[0], 0.0],
    ])
    a_w[1:, 3:] = np.eye(3)
    b_eq = np.array([mg, 0.0, 0.0, 0.0])
    n_pts = gmat.shape[1] // 3
    s_xy = np.zeros((2, 3 * n_pts))
    s_xy[0, 0::3] = 1.0
    s_xy[1, 1::3] = 1.0
    kappa = (plane.d_z - d_g) / mg
    return LpmSystem(
        faces=stacked_friction_faces(scene, sides),
        a_eq=a_w @ gmat,
        b_eq=b_eq,
        proj=kappa * s_xy,
        offset=scene.com[:2].copy(),
    )


def pendular_support_area_dd(scene, plane, sides=4, backend=None):
    """Pendular support area by double description of the force polytope."""
    sys = lpm_system(scene, plane, sides)
    h = HRep(sys.faces, np.zeros(len(sys.faces)), sys.a_eq, sys.b_eq)
    try:
        vr = dd_hrep_to_vrep(h, backend=backend)
    except InconsistentEqualities as exc:
        raise EmptyArea(str(exc)) from exc
    if len(vr.vertices) == 0:
        raise EmptyArea("no pendulum-mode-consistent contact forces")
    pts = sys.offset + vr.vertices @ sys.proj.T
    dirs = vr.rays @ sys.proj.T if len(vr.rays) else np.zeros((0, 2))
    norms = np.linalg.norm(dirs, axis=1) if len(dirs) else np.zeros(0)
    dirs = dirs[norms > 1e-12] / norms[norms > 1e-12, None] if len(dirs) else dirs
    if len(dirs) == 0:
        return SupportArea(plane, "polygon", polygon=convex_hull_2d(pts))
    seen, kept = set(), []
    for d in dirs:
        key = (np.round(d, 9) + 0.0).tobytes()
        if key not in seen:
            seen.add(key)
            kept.append(d)
    dirs = np.array(kept)
    span = _classify_span(dirs)
    if span == "plane":
        return SupportArea(plane, "whole_plane")
    return SupportArea(plane, "cone", cone_plus=Cone2(convex_hull_2d(pts), dirs, span))


def pendular_support_area_rayshoot(
    scene, plane, sides=4, initial_directions=8, refine_tol=1e-4, max_depth=12
):
    """Pendular support area by recursive support-function maximization.

    Robust fallback for stances where double description is slow: each probe
    is one LP over the stacked forces; edges are split until the supporting
    vertex moves the hull by less than refine_tol.
    """
    sys = lpm_system(scene, plane, sides)

    def support(direction):
        res = solve_lp(LpProblem(
            -(sys.proj.T @ direction), sys.faces, np.zeros(len(sys.faces)),
            sys.a_eq, sys.b_eq,
        ))
        if res.status == "unbounded":
            raise UnboundedDirection("pendular area is unbounded (conical)")
        if res.status != "optimal":
            raise EmptyArea("no pendulum-mode-consistent contact forces")
        return sys.offset + sys.proj @ res.x

    angles = 2.0 * np.pi * np.arange(initial_directions) / initial_directions
    found = [support(np.array([np.cos(a), np.sin(a)])) for a in angles]

    def refine(a_pt, b_pt, depth):
        edge = b_pt - a_pt
        ln = np.linalg.norm(edge)
        if ln <= 1e-9 or depth >= max_depth:
            return
        outward = np.array([edge[1], -edge[0]]) / ln
        z = support(outward)
        if outward @ (z - a_pt) > refine_tol:
            found.append(z)
            refine(a_pt, z, depth + 1)
            refine(z, b_pt, depth + 1)

    hull = convex_hull_2d(np.array(found))
    verts = hull.vertices
    if len(verts) >= 2:
        for i in range(len(verts)):
            a_pt, b_pt = verts[i], verts[(i + 1) % len(verts)]
            if len(verts) == 2 and i == 1:
                refine(b_pt, a_pt, 0)
                break
            refine(a_pt, b_pt, 0)
    return convex_hull_2d(np.array(found))


def zmp_lpm_feasible(scene, plane, point, sides=4):
    """Contact forces realizing the given plane point as a pendulum-mode ZMP.

    Returns the stacked force witness reshaped (n_points, 3), or None when
    the point is not a feasible ZMP.
    """
    sys = lpm_system(scene, plane, sides)
    point = np.asarray(point, dtype=float).reshape(2)
    a_eq = np.vstack([sys.a_eq, sys.proj])
    b_eq = np.concatenate([sys.b_eq, point - sys.offset])
    res = solve_lp(LpProblem(
        np.zeros(sys.faces.shape[1]), sys.faces, np.zeros(len(sys.faces)), a_eq, b_eq
    ))
    if res.status != "optimal":
        return None
    return res.x.reshape(-1, 3)


@dataclass(frozen=True)
class NmpVolume:
    """Support volume of the axial moment point (3D extension of the ZMP).

    kind == "hull": the volume is the convex hull of `vertices`.
    kind == "two_cones": union of two polyhedral cones built on the positive-
    and negative-pressure vertex sets with +/- `ray_directions`.
    """

    plane: object
    kind: str
    vertices: np.ndarray
    pressures: np.ndarray
    ray_directions: np.ndarray

    def project_area(self):
        """Projection along the plane normal, reassembled as a SupportArea."""
        pts = self.plane.to_plane(self.vertices)
        if self.kind == "hull":
            return SupportArea(self.plane, "polygon", polygon=convex_hull_2d(pts))
        dirs = self.plane.to_plane(self.ray_directions)
        norms = np.linalg.norm(dirs, axis=1)
        dirs = dirs[norms > 1e-9] / norms[norms > 1e-9, None]
        span = _classify_span(dirs)
        pos = convex_hull_2d(pts[self.pressures > 0.0])
        neg = convex_hull_2d(pts[self.pressures < 0.0])
        if span == "plane":
            return SupportArea(self.plane, "whole_plane", near_degenerate=True)
        return SupportArea(
            self.plane, "two_cones",
            cone_plus=Cone2(pos, dirs, span),
            cone_minus=Cone2(neg, -dirs, span),
        )


def moment_from_nmp(point, pressure, plane, ref_point=(0.0, 0.0, 0.0)):
    """Rebuild the moment at ref_point from an axial moment point (screw form)."""
    n = plane.normal
    om = np.asarray(point, dtype=float) - np.asarray(ref_point, dtype=float)
    return pressure * np.cross(om, n) + pressure * (om @ n) * n


def nmp_support_volume(scene, plane, sides=4):
    """Vertices (and cones, for mixed pressures) of the moment-point volume."""
    origin = plane.origin
    gens = cwc_span(scene, ref_point=origin, sides=sides)
    n = plane.normal
    pressures = gens.pressures(n)
    if np.any(np.abs(pressures) <= PRESSURE_TOL):
        raise NormalDegenerate("a wrench generator has zero virtual pressure")
    planar = np.cross(np.broadcast_to(n, gens.moments.shape), gens.moments) / pressures[:, None]
    axial = (gens.moments @ n) / pressures
    verts = origin + planar + axial[:, None] * n
    pos = pressures > 0.0
    if pos.all() or (~pos).all():
        return NmpVolume(plane, "hull", verts, pressures, np.zeros((0, 3)))
    diffs = (verts[pos][:, None, :] - verts[~pos][None, :, :]).reshape(-1, 3)
    norms = np.linalg.norm(diffs, axis=1)
    dirs = diffs[norms > 1e-9] / norms[norms > 1e-9, None]
    seen, kept = set(), []
    for d in dirs:
        key = (np.round(d, 9) + 0.0).tobytes()
        if key not in seen:
            seen.add(key)
            kept.append(d)
    return NmpVolume(plane, "two_cones", verts, pressures, np.array(kept))
