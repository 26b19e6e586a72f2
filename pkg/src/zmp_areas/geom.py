"""Low-level 2D/3D geometry: plane bases, convex hulls, Minkowski differences, dual cones.

All coordinates are in meters (or newtons for force-space vectors); the
absolute geometric tolerance is TOL.
"""

from dataclasses import dataclass

import numpy as np

from .polyhedra import HRep
from .solvers import LpProblem, solve_lp

TOL = 1e-9          # absolute tolerance on coordinates
ORTHO_TOL = 1e-12   # orthonormality tolerance for frames


def unit(v):
    """Return v normalized to unit Euclidean norm."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def crossmat(v):
    """Skew-symmetric matrix M with M @ u == cross(v, u)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def plane_basis(n):
    """Deterministic orthonormal in-plane pair (t, b) with (t, b, n) right-handed.

    t is derived from the world axis least aligned with n, so canonical
    planes get canonical bases: n = +e_z gives t = e_x, b = e_y.
    """
    n = np.asarray(n, dtype=float)
    k = int(np.argmin(np.abs(n)))
    e = np.zeros(3)
    e[k] = 1.0
    t = unit(e - np.dot(e, n) * n)
    b = np.cross(n, t)
    return t, b


@dataclass(frozen=True)
class VirtualPlane:
    """Plane {p : normal . p == d_z} with a fixed in-plane chart (t, b).

    2D coordinates of a point p are (t . p, b . p); for points on the plane
    this is an isometric chart independent of any reference point.
    """

    normal: np.ndarray
    d_z: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > ORTHO_TOL:
            n = unit(n)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "d_z", float(self.d_z))
        t, b = plane_basis(n)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "b", b)

    @property
    def origin(self):
        """Point of the plane closest to the world origin."""
        return self.d_z * self.normal

    def height_of(self, p):
        """Coordinate of p along the plane normal."""
        return float(np.dot(np.asarray(p, dtype=float), self.normal))

    def to_plane(self, points):
        """Project 3D points onto the (t, b) chart (drops the n coordinate)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        xy = np.column_stack([p @ self.t, p @ self.b])
        return xy[0] if np.asarray(points).ndim == 1 else xy

    def to_world(self, points2d):
        """Lift chart coordinates back to 3D points on the plane."""
        q = np.atleast_2d(np.asarray(points2d, dtype=float))
        w = np.outer(q[:, 0], self.t) + np.outer(q[:, 1], self.b) + self.d_z * self.normal
        return w[0] if np.asarray(points2d).ndim == 1 else w


@dataclass(frozen=True)
class Polygon2:
    """Convex polygon in chart coordinates; vertices CCW, deduplicated.

    kind is "polygon", "segment", "point" or "empty"; degenerate hulls are
    values, not errors (single-point contacts legitimately produce them).
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "vertices", v)

    @property
    def kind(self):
        n = len(self.vertices)
        return ("empty", "point", "segment")[n] if n < 3 else "polygon"

    def area(self):
        v = self.vertices
        if len(v) < 3:
            return 0.0
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def centroid(self):
        v = self.vertices
        if len(v) == 0:
            raise ValueError("empty polygon has no centroid")
        if len(v) < 3:
            return v.mean(axis=0)
        x, y = v[:, 0], v[:, 1]
        cr = x * np.roll(y, -1) - np.roll(x, -1) * y
        a = cr.sum() / 2.0
        cx = ((x + np.roll(x, -1)) * cr).sum() / (6.0 * a)
        cy = ((y + np.roll(y, -1)) * cr).sum() / (6.0 * a)
        return np.array([cx, cy])

    def halfplanes(self):
        """Outward edge normals as (A, b) with the polygon = {x : A x <= b}."""
        v = self.vertices
        if len(v) < 3:
            raise ValueError("halfplanes need a non-degenerate polygon")
        edges = np.roll(v, -1, axis=0) - v
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        return normals, offsets

    def contains(self, p, margin=0.0, tol=TOL):
        """True if p is inside, at least `margin` away from every edge."""
        p = np.asarray(p, dtype=float)
        if self.kind == "empty":
            return False
        if self.kind in ("point", "segment"):
            return self.distance(p) <= tol - margin
        a, b = self.halfplanes()
        return bool(np.all(a @ p <= b - margin + tol))

    def distance(self, p):
        """Euclidean distance from p to the polygon (0 if inside)."""
        p = np.asarray(p, dtype=float)
        v = self.vertices
        if len(v) == 0:
            return np.inf
        if len(v) == 1:
            return float(np.linalg.norm(p - v[0]))
        if self.kind == "polygon" and self.contains(p, tol=0.0):
            return 0.0
        best = np.inf
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            if len(v) == 2 and i == 1:
                break
            ab = b - a
            t = np.clip(np.dot(p - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
            best = min(best, float(np.linalg.norm(p - (a + t * ab))))
        return best

    def hausdorff(self, other):
        """Hausdorff distance between two convex polygons (vertex-attained)."""
        if len(self.vertices) == 0 or len(other.vertices) == 0:
            return 0.0 if len(self.vertices) == len(other.vertices) else np.inf
        d1 = max(other.distance(p) for p in self.vertices)
        d2 = max(self.distance(p) for p in other.vertices)
        return max(d1, d2)


def _dedup_points(points, tol):
    """Snap to a tol grid and deduplicate; output is lexicographically sorted.

    Quantizing first keeps sub-tol coordinate jitter from scrambling the
    lexicographic order the monotone chain depends on.
    """
    q = np.round(points / tol) * tol + 0.0
    return np.unique(q, axis=0)


def convex_hull_2d(points, tol=TOL):
    """Minimal CCW hull by monotone chain; collinear interior points removed."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex_hull_2d needs at least one point")
    pts = _dedup_points(pts, tol)
    if len(pts) == 1:
        return Polygon2(pts)
    if len(pts) == 2:
        return Polygon2(pts)

    def keeps_turning(chain, p):
        a, b = chain[-2], chain[-1]
        cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        return cross > tol * max(1.0, np.linalg.norm(b - a))

    lower = []
    for p in pts:
        while len(lower) >= 2 and not keeps_turning(lower, p):
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and not keeps_turning(upper, p):
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) == 2 and np.linalg.norm(hull[0] - hull[1]) <= tol:
        hull = hull[:1]
    # rotate so the lexicographically smallest vertex comes first
    start = np.lexsort((hull[:, 1], hull[:, 0]))[0]
    return Polygon2(np.roll(hull, -start, axis=0))


def minkowski_difference(p, q):
    """Pointwise difference {a - b : a in P, b in Q} of two convex polygons."""
    pa, qa = p.vertices, q.vertices
    if len(pa) == 0 or len(qa) == 0:
        raise ValueError("minkowski_difference needs nonempty polygons")
    diffs = (pa[:, None, :] - qa[None, :, :]).reshape(-1, 2)
    return convex_hull_2d(diffs)


def clip_convex(subject, clip):
    """Intersection of two convex polygons (Sutherland-Hodgman)."""
    out = [tuple(v) for v in subject.vertices]
    if len(out) == 0 or clip.kind != "polygon":
        return Polygon2(np.zeros((0, 2)))
    normals, offsets = clip.halfplanes()
    for a, b in zip(normals, offsets):
        if not out:
            break
        nxt = []
        for i, cur in enumerate(out):
            prv = out[i - 1]
            cur_in = a[0] * cur[0] + a[1] * cur[1] <= b + TOL
            prv_in = a[0] * prv[0] + a[1] * prv[1] <= b + TOL
            if cur_in != prv_in:
                da = a[0] * (cur[0] - prv[0]) + a[1] * (cur[1] - prv[1])
                t = (b - a[0] * prv[0] - a[1] * prv[1]) / da
                nxt.append((prv[0] + t * (cur[0] - prv[0]), prv[1] + t * (cur[1] - prv[1])))
            if cur_in:
                nxt.append(cur)
        out = nxt
    if not out:
        return Polygon2(np.zeros((0, 2)))
    return convex_hull_2d(np.array(out))


def box_polygon(bound):
    """Axis-aligned square [-bound, bound]^2 as a Polygon2."""
    b = float(bound)
    return Polygon2(np.array([[-b, -b], [b, -b], [b, b], [-b, b]]))


def dual_cone(rays, tol=TOL):
    """H-rep of {y : y . f_i >= 0 for all i} plus a strict interior witness.

    Returns (hrep, witness); witness is None when the dual cone is {0},
    i.e. the rays positively span the whole space. When returned, the
    witness maximizes min_i y . f_i / |f_i| over the unit box.
    """
    f = np.asarray(rays, dtype=float).reshape(-1, 3)
    norms = np.linalg.norm(f, axis=1)
    f = f[norms > tol]
    if len(f) == 0:
        raise ValueError("dual_cone needs at least one nonzero ray")
    fhat = f / np.linalg.norm(f, axis=1)[:, None]
    hrep = HRep(-fhat, np.zeros(len(fhat)))
    # variables (y, t): maximize t subject to fhat_i . y >= t, |y|_inf <= 1
    k = len(fhat)
    g = np.zeros((k + 6, 4))
    g[:k, :3] = -fhat
    g[:k, 3] = 1.0
    g[k:k + 3, :3] = np.eye(3)
    g[k + 3:, :3] = -np.eye(3)
    h = np.concatenate([np.zeros(k), np.ones(6)])
    c = np.array([0.0, 0.0, 0.0, -1.0])
    res = solve_lp(LpProblem(c, g, h))
    if res.status != "optimal" or res.x[3] <= tol:
        return hrep, None
    return hrep, unit(res.x[:3])
