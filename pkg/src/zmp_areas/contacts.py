"""Contact scene model: surfaces, points, friction pyramids, grasp matrix, CWC span."""

from dataclasses import dataclass, field

import numpy as np

FRAME_TOL = 1e-12
GRAVITY = np.array([0.0, 0.0, -9.81])


def _check_frame(rot):
    rot = np.asarray(rot, dtype=float).reshape(3, 3)
    if np.max(np.abs(rot.T @ rot - np.eye(3))) > 1e-9 or np.linalg.det(rot) < 0.0:
        raise ValueError("frame must be a right-handed rotation matrix")
    return rot


@dataclass(frozen=True)
class ContactPoint:
    """Point contact with frame columns (t, b, n); n points from the environment to the robot."""

    position: np.ndarray
    frame: np.ndarray
    friction: float

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "frame", _check_frame(self.frame))
        if self.friction <= 0.0:
            raise ValueError("friction coefficient must be positive")

    @property
    def tangent(self):
        return self.frame[:, 0]

    @property
    def bitangent(self):
        return self.frame[:, 1]

    @property
    def normal(self):
        return self.frame[:, 2]


@dataclass(frozen=True)
class ContactSurface:
    """Rectangular surface contact; forces act at the four corners."""

    center: np.ndarray
    rotation: np.ndarray
    half_lengths: np.ndarray
    friction: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        object.__setattr__(self, "rotation", _check_frame(self.rotation))
        hl = np.asarray(self.half_lengths, dtype=float).reshape(2)
        if np.any(hl <= 0.0):
            raise ValueError("half lengths must be positive")
        object.__setattr__(self, "half_lengths", hl)
        if self.friction <= 0.0:
            raise ValueError("friction coefficient must be positive")

    def corners(self):
        x, y = self.half_lengths
        local = np.array([[x, y, 0.0], [-x, y, 0.0], [-x, -y, 0.0], [x, -y, 0.0]])
        return self.center + local @ self.rotation.T


def surface_to_points(surface):
    """The four corner contact points, inheriting the surface frame and friction."""
    return tuple(
        ContactPoint(corner, surface.rotation, surface.friction)
        for corner in surface.corners()
    )


@dataclass(frozen=True)
class ContactScene:
    """Contacts plus the mass/COM/gravity data the support-area computations need."""

    contacts: tuple
    mass: float
    com: np.ndarray
    gravity: np.ndarray = field(default_factory=lambda: GRAVITY.copy())

    def __post_init__(self):
        object.__setattr__(self, "contacts", tuple(self.contacts))
        object.__setattr__(self, "com", np.asarray(self.com, dtype=float).reshape(3))
        object.__setattr__(self, "gravity", np.asarray(self.gravity, dtype=float).reshape(3))
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if len(self.contacts) == 0:
            raise ValueError("scene needs at least one contact")

    @property
    def points(self):
        out = []
        for c in self.contacts:
            if isinstance(c, ContactSurface):
                out.extend(surface_to_points(c))
            else:
                out.append(c)
        return tuple(out)

    def with_com(self, com):
        return ContactScene(self.contacts, self.mass, com, self.gravity)


def linearize_friction(contact, sides=4):
    """Span rays of the inner friction pyramid at a contact.

    Rays are n + mu * (cos(t_j) t + sin(t_j) b) with t_j staggered by half a
    sector, so every ray lies exactly on the quadratic Coulomb cone; the
    pyramid they span is an inner approximation whose faces sit at apothem
    mu * cos(pi/sides). Rays are left unnormalized: downstream formulas are
    scale-invariant in the span coefficients.
    """
    if sides < 4 or sides % 2:
        raise ValueError("side count must be an even integer >= 4")
    angles = (2.0 * np.arange(sides) + 1.0) * np.pi / sides
    tang = np.outer(np.cos(angles), contact.tangent) + np.outer(np.sin(angles), contact.bitangent)
    return contact.normal + contact.friction * tang


def friction_face_rows(contact, sides=4):
    """Face form of the same pyramid: rows F with F f <= 0 iff f in cone(rays)."""
    rays = linearize_friction(contact, sides)
    rows = []
    for j in range(sides):
        normal = np.cross(rays[j], rays[(j + 1) % sides])
        normal /= np.linalg.norm(normal)
        if normal @ contact.normal > 0.0:
            normal = -normal
        rows.append(normal)
    return np.array(rows)


def stacked_friction_faces(scene, sides=4):
    """Block-diagonal face matrix over all contact points (rows F, F f_all <= 0)."""
    points = scene.points
    n = len(points)
    out = np.zeros((sides * n, 3 * n))
    for i, c in enumerate(points):
        out[sides * i:sides * (i + 1), 3 * i:3 * (i + 1)] = friction_face_rows(c, sides)
    return out


@dataclass(frozen=True)
class WrenchGeneratorSet:
    """Span of the contact wrench cone: one (force, moment) pair per pyramid ray."""

    forces: np.ndarray            # (k, 3)
    moments: np.ndarray           # (k, 3), about ref_point
    application_points: np.ndarray  # (k, 3)
    point_index: np.ndarray       # (k,)
    ref_point: np.ndarray         # (3,)

    def __len__(self):
        return len(self.forces)

    @property
    def wrenches(self):
        return np.hstack([self.forces, self.moments])

    def pressures(self, normal):
        return self.forces @ np.asarray(normal, dtype=float)


def cwc_span(scene, ref_point=(0.0, 0.0, 0.0), sides=4):
    """Span representation of the contact wrench cone, one generator per pyramid ray."""
    ref = np.asarray(ref_point, dtype=float).reshape(3)
    forces, moments, apps, idx = [], [], [], []
    for i, c in enumerate(scene.points):
        arm = c.position - ref
        for ray in linearize_friction(c, sides):
            forces.append(ray)
            moments.append(np.cross(arm, ray))
            apps.append(c.position)
            idx.append(i)
    return WrenchGeneratorSet(
        np.array(forces), np.array(moments), np.array(apps),
        np.array(idx, dtype=int), ref,
    )


def grasp_matrix(scene, ref_point=(0.0, 0.0, 0.0)):
    """6 x 3n map from stacked contact forces to the net wrench at ref_point."""
    ref = np.asarray(ref_point, dtype=float).reshape(3)
    points = scene.points
    out = np.zeros((6, 3 * len(points)))
    for i, c in enumerate(points):
        arm = c.position - ref
        out[:3, 3 * i:3 * i + 3] = np.eye(3)
        out[3:, 3 * i:3 * i + 3] = np.array([
            [0.0, -arm[2], arm[1]],
            [arm[2], 0.0, -arm[0]],
            [-arm[1], arm[0], 0.0],
        ])
    return out


def coulomb_check(contact, force, tol=1e-9):
    """True iff force satisfies the quadratic Coulomb cone at the contact."""
    f = np.asarray(force, dtype=float).reshape(3)
    fn = f @ contact.normal
    tangential = f - fn * contact.normal
    return bool(np.linalg.norm(tangential) <= contact.friction * fn + tol)
