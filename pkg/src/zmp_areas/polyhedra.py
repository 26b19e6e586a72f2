"""Polyhedron representations and double-description (H <-> V) conversion.

Conventions
-----------
H-rep: {x : a x <= b, a_eq x = b_eq}. V-rep: conv(vertices) + cone(rays);
when the vertex list is empty but rays exist, the set is the cone of the
rays (apex at the origin). Lines are emitted as +/- ray pairs.

The conversion is an incremental double description on a homogeneous cone:
polytopes are lifted by one coordinate, equalities are eliminated first.
Constraints are inserted in lexicographic order and adjacency of ray pairs
is certified by a rank test, which makes results (and failures)
reproducible. The inner pairing loop is the hot path; it lives in a
compiled kernel (_ddkernel) with a pure-NumPy fallback (_ddkernel_py).
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InconsistentEqualities, IterationLimit, ScaleLimit
from . import _ddkernel_py as _python_kernel

try:
    from . import _ddkernel as _compiled_kernel
except ImportError:
    _compiled_kernel = None

KERNEL_BACKEND = "compiled" if _compiled_kernel is not None else "python"

ZERO_TOL = 1e-8         # tightness / sign tolerance on normalized rows and rays
PIVOT_TOL = 1e-10       # rank pivot threshold, relative to the largest entry
DEFAULT_MAX_RAYS = 100_000
DEFAULT_MAX_PAIRS = 2_000_000


def _get_kernel(backend):
    if backend in (None, "auto"):
        return _compiled_kernel if _compiled_kernel is not None else _python_kernel
    if backend == "python":
        return _python_kernel
    if backend == "compiled":
        if _compiled_kernel is None:
            raise ValueError("compiled double-description kernel is not available")
        return _compiled_kernel
    raise ValueError(f"unknown backend {backend!r}")


def available_backends():
    out = ["python"]
    if _compiled_kernel is not None:
        out.insert(0, "compiled")
    return out


@dataclass(frozen=True)
class HRep:
    """Inequalities a x <= b plus optional equalities a_eq x = b_eq."""

    a: np.ndarray
    b: np.ndarray
    a_eq: np.ndarray = None
    b_eq: np.ndarray = None

    def __post_init__(self):
        def as_matrix(mat):
            mat = np.asarray(mat, dtype=float)
            if mat.ndim == 1:
                mat = mat.reshape(1, -1) if mat.size else mat.reshape(0, 0)
            return mat

        a = as_matrix(self.a)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if a.shape[0] != b.shape[0]:
            raise ValueError("inequality row counts differ")
        if self.a_eq is None:
            a_eq = np.zeros((0, a.shape[1]))
            b_eq = np.zeros(0)
        else:
            a_eq = as_matrix(self.a_eq)
            b_eq = np.asarray(self.b_eq, dtype=float).reshape(-1)
        if a_eq.shape[0] != b_eq.shape[0]:
            raise ValueError("equality row counts differ")
        if a.shape[0] and a_eq.shape[0] and a.shape[1] != a_eq.shape[1]:
            raise ValueError("inequality/equality dimensions differ")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a_eq", a_eq)
        object.__setattr__(self, "b_eq", b_eq)

    @property
    def dim(self):
        return self.a.shape[1] if self.a.shape[1] else self.a_eq.shape[1]

    @property
    def n_eq(self):
        return self.a_eq.shape[0]

    def contains(self, x, tol=1e-7):
        x = np.asarray(x, dtype=float)
        ok = True
        if len(self.a):
            ok = bool(np.all(self.a @ x <= self.b + tol))
        if ok and self.n_eq:
            ok = bool(np.all(np.abs(self.a_eq @ x - self.b_eq) <= tol))
        return ok

    @classmethod
    def cone(cls, a):
        a = np.atleast_2d(np.asarray(a, dtype=float))
        return cls(a, np.zeros(len(a)))


@dataclass(frozen=True)
class VRep:
    """Generators: conv(vertices) + cone(rays)."""

    vertices: np.ndarray
    rays: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        r = np.asarray(self.rays, dtype=float)
        if v.ndim == 2 and v.shape[1]:
            d = v.shape[1]
        elif r.ndim == 2 and r.shape[1]:
            d = r.shape[1]
        else:
            d = 1
        object.__setattr__(self, "vertices", v.reshape(-1, d))
        object.__setattr__(self, "rays", r.reshape(-1, d))

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def is_empty(self):
        return len(self.vertices) == 0 and len(self.rays) == 0


@dataclass(frozen=True)
class AffineMap:
    """x = offset + basis @ z, lifting reduced coordinates to full space."""

    offset: np.ndarray
    basis: np.ndarray

    def lift_points(self, z):
        z = np.asarray(z, dtype=float).reshape(-1, self.basis.shape[1])
        return self.offset + z @ self.basis.T

    def lift_directions(self, z):
        z = np.asarray(z, dtype=float).reshape(-1, self.basis.shape[1])
        return z @ self.basis.T


def reduce_equalities(h, tol=1e-8):
    """Eliminate equalities, returning a reduced HRep and the lift back.

    Raises InconsistentEqualities when the equality system has no solution
    (e.g. an infeasible stance).
    """
    d = h.dim
    if h.n_eq == 0:
        return HRep(h.a, h.b), AffineMap(np.zeros(d), np.eye(d))
    a_eq, b_eq = h.a_eq, h.b_eq
    _, sv, vt = np.linalg.svd(a_eq, full_matrices=True)
    smax = sv[0] if len(sv) else 0.0
    rank = int(np.sum(sv > PIVOT_TOL * max(smax, 1.0)))
    x0, *_ = np.linalg.lstsq(a_eq, b_eq, rcond=None)
    residual = np.max(np.abs(a_eq @ x0 - b_eq)) if len(b_eq) else 0.0
    if residual > tol * max(1.0, np.max(np.abs(b_eq), initial=0.0)):
        raise InconsistentEqualities(f"equality residual {residual:.3e}")
    basis = vt[rank:].T
    a_red = h.a @ basis if len(h.a) else np.zeros((0, basis.shape[1]))
    b_red = h.b - h.a @ x0 if len(h.a) else h.b
    return HRep(a_red, b_red), AffineMap(x0, basis)


def _normalize_rows(rows, tol=1e-12):
    if len(rows) == 0:
        return rows
    norms = np.linalg.norm(rows, axis=1)
    keep = norms > tol
    return rows[keep] / norms[keep, None]


def _dedup_rows(rows, decimals=9):
    seen = set()
    out = []
    for r in rows:
        key = (np.round(r, decimals) + 0.0).tobytes()
        if key not in seen:
            seen.add(key)
            out.append(r)
    return np.array(out) if out else rows[:0]


def _lexsort_rows(rows):
    if len(rows) == 0:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _prep_rows(rows):
    return _lexsort_rows(_dedup_rows(_normalize_rows(np.asarray(rows, dtype=float))))


def _orthonormalize(rows):
    if len(rows) == 0:
        return rows
    q, _ = np.linalg.qr(rows.T)
    return np.ascontiguousarray(q.T)


def _cone_dd(rows, backend=None, max_rays=DEFAULT_MAX_RAYS, max_pairs=DEFAULT_MAX_PAIRS):
    """Extreme rays and lineality of {x : rows @ x <= 0}.

    rows must be preprocessed (unit norm, deduplicated, sorted); the
    insertion loop then proceeds in that fixed order. Exceeding the ray or
    pair caps raises IterationLimit: some stances genuinely explode
    combinatorially, and reporting beats grinding.
    """
    rows = np.ascontiguousarray(rows, dtype=float)
    m, d = rows.shape
    kernel = _get_kernel(backend)
    lineal = np.eye(d)
    rays = np.zeros((0, d))
    dots = np.zeros((0, m))
    for j in range(m):
        a = rows[j]
        dl = lineal @ a if len(lineal) else np.zeros(0)
        if len(dl) and np.max(np.abs(dl)) > ZERO_TOL:
            i0 = int(np.argmax(np.abs(dl)))
            b0 = lineal[i0]
            pivot = dl[i0]
            keep = np.arange(len(lineal)) != i0
            lineal = _orthonormalize(lineal[keep] - np.outer(dl[keep] / pivot, b0))
            if len(rays):
                rays = _normalize_rows(rays - np.outer((rays @ a) / pivot, b0))
            rays = np.ascontiguousarray(np.vstack([rays, -np.sign(pivot) * b0]))
            dots = rays @ rows.T
            continue
        if len(rays) == 0:
            continue
        s = np.ascontiguousarray(dots[:, j])
        pos = np.flatnonzero(s > ZERO_TOL)
        if len(pos) == 0:
            continue
        keep = np.flatnonzero(s <= ZERO_TOL)
        neg = np.flatnonzero(s < -ZERO_TOL)
        if len(pos) * len(neg) > max_pairs:
            raise IterationLimit(
                f"adjacency pair count {len(pos) * len(neg)} exceeded cap {max_pairs}"
            )
        tight = np.ascontiguousarray((np.abs(dots[:, :j]) <= ZERO_TOL).astype(np.uint8))
        need = d - len(lineal) - 2
        new = kernel.combine_adjacent(
            rays, s, tight, np.ascontiguousarray(rows[:j]), pos, neg, int(need), PIVOT_TOL
        )
        rays = _dedup_rows(np.vstack([rays[keep], _normalize_rows(np.asarray(new))]))
        rays = np.ascontiguousarray(rays)
        if len(rays) > max_rays:
            raise IterationLimit(f"ray count {len(rays)} exceeded cap {max_rays}")
        dots = rays @ rows.T
    return rays, lineal


def _project_out(points, lines):
    """Canonical representatives: remove lineality components, renormalize."""
    if len(points) == 0 or len(lines) == 0:
        return points
    basis = _orthonormalize(lines)
    return points - (points @ basis.T) @ basis


def dd_hrep_to_vrep(h, backend=None, max_rays=DEFAULT_MAX_RAYS, max_pairs=DEFAULT_MAX_PAIRS):
    """Convert an H-rep to generators by incremental double description."""
    if h.n_eq:
        red, lift = reduce_equalities(h)
        if red.dim == 0:
            feasible = np.all(red.b >= -ZERO_TOL) if len(red.b) else True
            verts = lift.offset[None, :] if feasible else np.zeros((0, h.dim))
            return VRep(verts, np.zeros((0, h.dim)))
        inner = dd_hrep_to_vrep(red, backend, max_rays, max_pairs)
        if inner.is_empty:
            return VRep(np.zeros((0, h.dim)), np.zeros((0, h.dim)))
        return VRep(lift.lift_points(inner.vertices), lift.lift_directions(inner.rays))

    d = h.dim
    if len(h.a) == 0:
        return VRep(np.zeros((1, d)), np.vstack([np.eye(d), -np.eye(d)]))

    if np.max(np.abs(h.b)) <= 1e-12:
        rows = _prep_rows(h.a)
        rays, lines = _cone_dd(rows, backend, max_rays, max_pairs)
        rays = _normalize_rows(_project_out(rays, lines))
        out = np.vstack([rays, lines, -lines]) if len(lines) else rays
        return VRep(np.zeros((0, d)), out)

    lifted = np.column_stack([h.a, -h.b])
    lifted = np.vstack([lifted, np.append(np.zeros(d), -1.0)])
    rows = _prep_rows(lifted)
    rays, lines = _cone_dd(rows, backend, max_rays, max_pairs)
    rays = _normalize_rows(_project_out(rays, lines))
    verts, dirs = [], []
    for r in rays:
        if r[d] > ZERO_TOL:
            verts.append(r[:d] / r[d])
        else:
            dirs.append(r[:d])
    for l in lines:
        dirs.extend([l[:d], -l[:d]])
    if not verts:
        return VRep(np.zeros((0, d)), np.zeros((0, d)))
    dirs = _normalize_rows(np.array(dirs)) if dirs else np.zeros((0, d))
    return VRep(np.array(verts), dirs)


def vrep_to_hrep(v, backend=None, max_rays=DEFAULT_MAX_RAYS, max_pairs=DEFAULT_MAX_PAIRS):
    """Convert generators to a facet description via polar-cone duality."""
    if v.is_empty:
        raise ValueError("vrep_to_hrep needs a nonempty V-rep")
    d = v.dim
    if len(v.vertices) == 0:
        rows = _prep_rows(v.rays)
        rays, lines = _cone_dd(rows, backend, max_rays, max_pairs)
        rays = _normalize_rows(_project_out(rays, lines))
        return HRep(
            rays.reshape(-1, d), np.zeros(len(rays)),
            lines.reshape(-1, d), np.zeros(len(lines)),
        )
    gens = np.vstack([
        np.column_stack([v.vertices, np.ones(len(v.vertices))]),
        np.column_stack([v.rays, np.zeros(len(v.rays))]) if len(v.rays) else np.zeros((0, d + 1)),
    ])
    rows = _prep_rows(gens)
    rays, lines = _cone_dd(rows, backend, max_rays, max_pairs)
    rays = _normalize_rows(_project_out(rays, lines))
    a, b = [], []
    for y in rays:
        norm = np.linalg.norm(y[:d])
        if norm <= 1e-12:
            continue  # trivial facet s >= 0 of the lifted cone
        a.append(y[:d] / norm)
        b.append(-y[d] / norm)
    a_eq, b_eq = [], []
    for y in lines:
        norm = np.linalg.norm(y[:d])
        if norm <= 1e-12:
            continue
        a_eq.append(y[:d] / norm)
        b_eq.append(-y[d] / norm)
    return HRep(
        np.array(a).reshape(-1, d), np.array(b),
        np.array(a_eq).reshape(-1, d), np.array(b_eq),
    )


def brute_force_vertices(h, tol=1e-7):
    """Vertices/rays by exhaustive facet-subset intersection (test oracle).

    Only intended for d <= 8 and <= 20 inequalities; raises ScaleLimit above.
    """
    if h.n_eq:
        red, lift = reduce_equalities(h)
        if red.dim == 0:
            feasible = np.all(red.b >= -tol) if len(red.b) else True
            verts = lift.offset[None, :] if feasible else np.zeros((0, h.dim))
            return VRep(verts, np.zeros((0, h.dim)))
        inner = brute_force_vertices(red, tol)
        return VRep(lift.lift_points(inner.vertices), lift.lift_directions(inner.rays))
    a, b = h.a, h.b
    m, d = a.shape
    if d > 8 or m > 20:
        raise ScaleLimit(f"brute force limited to d<=8, m<=20 (got d={d}, m={m})")

    verts = []
    for subset in combinations(range(m), d):
        asub = a[list(subset)]
        sv = np.linalg.svd(asub, compute_uv=False)
        if sv[-1] <= PIVOT_TOL * max(sv[0], 1.0):
            continue
        x = np.linalg.solve(asub, b[list(subset)])
        if np.all(a @ x <= b + tol):
            verts.append(x)
    verts = _cluster_points(verts, tol)

    dirs = []
    if d == 1:
        for u in (np.array([1.0]), np.array([-1.0])):
            if np.all(a @ u <= tol):
                dirs.append(u)
    else:
        for subset in combinations(range(m), d - 1):
            asub = a[list(subset)].reshape(len(subset), d)
            _, sv, vt = np.linalg.svd(asub, full_matrices=True) if len(subset) else (None, np.zeros(0), np.eye(d))
            rank = int(np.sum(sv > PIVOT_TOL * max(sv[0] if len(sv) else 0.0, 1.0)))
            if rank != d - 1:
                continue
            u = vt[-1]
            for cand in (u, -u):
                if np.all(a @ cand <= tol):
                    dirs.append(cand / np.linalg.norm(cand))
    dirs = _cluster_points(dirs, 1e-9)
    return VRep(
        np.array(verts).reshape(-1, d),
        np.array(dirs).reshape(-1, d),
    )


def _cluster_points(points, tol):
    if not len(points):
        return []
    pts = np.array(points)
    order = np.lexsort(pts.T[::-1])
    out = []
    for p in pts[order]:
        if all(np.linalg.norm(p - q) > tol for q in out):
            out.append(p)
    return out
