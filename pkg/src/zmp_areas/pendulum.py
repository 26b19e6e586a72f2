"""Linear pendulum modes, ZMP trajectory QP, COM integration, plane selection.

The discrete model is the exact closed-form discretization of
eta_dd = omega^2 (gamma - eta) over fixed steps; the trajectory generator
optimizes the ZMP command path gamma on [0, 1] with terminal state pinned
at the destination.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePlane, EmptyArea, NoFeasiblePlane, TrajectoryInfeasible
from .geom import VirtualPlane
from .solvers import QpProblem, solve_qp
from .support_areas import EZ, pendular_support_area_dd


@dataclass(frozen=True)
class PendulumMode:
    """Linear pendulum: inverted when the plane is below the COM."""

    kind: str        # "inverted" | "non_inverted"
    omega: float     # rad/s
    height: float    # |d_G - d_Z|, m

    @property
    def sign(self):
        """Sign of the ZMP-to-COM acceleration coupling (+1 non-inverted)."""
        return 1.0 if self.kind == "non_inverted" else -1.0


def make_mode(d_g, d_z, g=9.81):
    """Pendulum mode for a COM at height d_g and a virtual plane at d_z."""
    if g <= 0.0:
        raise ValueError("gravity magnitude must be positive")
    h = abs(d_g - d_z)
    if h < 1e-9:
        raise DegeneratePlane("virtual plane passes through the COM")
    kind = "inverted" if d_z < d_g else "non_inverted"
    return PendulumMode(kind, float(np.sqrt(g / h)), float(h))


def discretize(mode, dt):
    """Exact one-step state matrix and input column for eta_dd = w^2 (gamma - eta)."""
    w = mode.omega
    c, s = np.cos(w * dt), np.sin(w * dt)
    amat = np.array([[c, s / w], [-w * s, c]])
    kvec = np.array([1.0 - c, w * s])
    return amat, kvec


@dataclass(frozen=True)
class TrajProblem:
    """Segment endpoints plus discretization and objective weights."""

    p0: np.ndarray
    p1: np.ndarray
    steps: int
    dt: float
    mode: PendulumMode
    w1: float = 1.0
    w2: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "p0", np.asarray(self.p0, dtype=float).reshape(3))
        object.__setattr__(self, "p1", np.asarray(self.p1, dtype=float).reshape(3))
        if self.steps < 2:
            raise ValueError("need at least two steps")
        if self.dt <= 0.0 or self.w1 < 0.0 or self.w2 < 0.0:
            raise ValueError("bad discretization or weights")

    @property
    def plane_height(self):
        return self.p0[2] + self.mode.sign * self.mode.height


@dataclass(frozen=True)
class TrajectorySolution:
    """ZMP command path gamma with the induced COM states along the segment."""

    problem: TrajProblem
    gamma: np.ndarray       # (K,)
    eta: np.ndarray         # (K+1,)
    eta_dot: np.ndarray     # (K+1,)
    x0: np.ndarray          # initial state used for simulation
    objective: float

    def com_points(self):
        p0, p1 = self.problem.p0, self.problem.p1
        return p0 + np.outer(self.eta, p1 - p0)

    def zmp_points(self):
        p0, p1 = self.problem.p0, self.problem.p1
        d_z = self.problem.plane_height
        pts = p0 + np.outer(self.gamma, p1 - p0)
        pts[:, 2] = d_z
        return pts


def generate_trajectory(problem):
    """Solve the ZMP-path QP: smooth command in [0, 1], COM pinned at the goal.

    The objective trades COM/ZMP separation (acceleration) against ZMP
    velocity; constraints keep the ZMP on the segment, land the COM on the
    destination with zero velocity and pin the final ZMP command there.
    """
    k = problem.steps
    p0, p1 = problem.p0, problem.p1
    if np.linalg.norm(p1 - p0) <= 1e-12:
        ones = np.ones(k)
        return TrajectorySolution(
            problem, ones, np.ones(k + 1), np.zeros(k + 1),
            np.array([1.0, 0.0]), 0.0,
        )
    if abs(p0[2] - p1[2]) > 1e-9:
        raise ValueError("pendulum-mode segments must keep the COM height constant")

    amat, kvec = discretize(problem.mode, problem.dt)
    psi = np.zeros((k + 1, 2, k))
    for i in range(k):
        psi[i + 1] = amat @ psi[i]
        psi[i + 1][:, i] += kvec
    m_eta = psi[:k, 0, :]
    a1 = m_eta - np.eye(k)
    diff = np.zeros((k - 1, k))
    diff[np.arange(k - 1), np.arange(k - 1)] = -1.0
    diff[np.arange(k - 1), np.arange(1, k)] = 1.0
    q_mat = 2.0 * (problem.w1 / k * a1.T @ a1 + problem.w2 * diff.T @ diff)

    a_eq = np.vstack([psi[k], np.eye(k)[k - 1]])
    b_eq = np.array([1.0, 0.0, 1.0])
    bounds_g = np.vstack([np.eye(k), -np.eye(k)])
    bounds_h = np.concatenate([np.ones(k), np.zeros(k)])

    res = solve_qp(QpProblem(q_mat, np.zeros(k), bounds_g, bounds_h, a_eq, b_eq))
    if res.status != "optimal":
        raise TrajectoryInfeasible(
            "terminal state unreachable for this horizon and pendulum frequency"
        )
    gamma = np.clip(res.x, 0.0, 1.0)
    states = np.einsum("kij,j->ki", psi, gamma)
    return TrajectorySolution(
        problem, gamma, states[:, 0], states[:, 1], np.zeros(2), float(res.value)
    )


def com_zmp_relation(p_g, p_g_ddot, l_g_dot, zmp, plane, mass, gravity=(0.0, 0.0, -9.81)):
    """Residual of the COM-acceleration / ZMP / angular-momentum coupling.

    Zero residual means the candidate ZMP is consistent with the given COM
    acceleration and momentum derivative.
    """
    p_g = np.asarray(p_g, dtype=float)
    acc = np.asarray(p_g_ddot, dtype=float)
    ldot = np.asarray(l_g_dot, dtype=float)
    z = np.asarray(zmp, dtype=float)
    g = np.asarray(gravity, dtype=float)
    n = plane.normal
    denom = float(n @ p_g) - plane.d_z
    if abs(denom) < 1e-9:
        raise DegeneratePlane("COM lies in the virtual plane")
    return acc - g - (n @ (acc - g)) / denom * (p_g - z) - np.cross(n, ldot) / (mass * denom)


@dataclass(frozen=True)
class ComPath:
    """Integrated COM samples (one block of `substeps` per ZMP command)."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    zmp_refs: np.ndarray   # ZMP target active on each sample interval

    @property
    def final_position(self):
        return self.positions[-1]


def _accel(mode, gravity, zmp, pos, vel, zeta):
    return gravity + mode.sign * mode.omega**2 * (zmp - pos) - 2.0 * zeta * mode.omega * vel


def integrate_com(solution, mode=None, damping=0.1, substeps=10, method="rk4",
                  gravity=(0.0, 0.0, -9.81)):
    """Integrate the 3D COM under the pendulum dynamics driven by the ZMP path.

    method "rk4" supports damping; "exact" uses the closed-form flow of the
    undamped linear dynamics per substep and requires damping == 0.
    """
    if mode is None:
        mode = solution.problem.mode
    if method == "exact" and damping != 0.0:
        raise ValueError("closed-form integration requires zero damping")
    g = np.asarray(gravity, dtype=float)
    zmps = solution.zmp_points()
    dt = solution.problem.dt
    h = dt / substeps
    pos = solution.problem.p0.astype(float).copy()
    vel = np.zeros(3)
    times = [0.0]
    positions = [pos.copy()]
    velocities = [vel.copy()]
    refs = [zmps[0]]
    w = mode.omega
    for k in range(len(zmps)):
        z = zmps[k]
        center = z + g / (mode.sign * w**2)
        for j in range(substeps):
            if method == "exact":
                u = pos - center
                if mode.sign > 0:
                    c, s = np.cos(w * h), np.sin(w * h)
                    u, vel = u * c + vel * s / w, -w * s * u + c * vel
                else:
                    c, s = np.cosh(w * h), np.sinh(w * h)
                    u, vel = u * c + vel * s / w, w * s * u + c * vel
                pos = center + u
            else:
                k1v = _accel(mode, g, z, pos, vel, damping)
                k1p = vel
                k2v = _accel(mode, g, z, pos + 0.5 * h * k1p, vel + 0.5 * h * k1v, damping)
                k2p = vel + 0.5 * h * k1v
                k3v = _accel(mode, g, z, pos + 0.5 * h * k2p, vel + 0.5 * h * k2v, damping)
                k3p = vel + 0.5 * h * k2v
                k4v = _accel(mode, g, z, pos + h * k3p, vel + h * k3v, damping)
                k4p = vel + h * k3v
                pos = pos + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
                vel = vel + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            times.append(times[-1] + h)
            positions.append(pos.copy())
            velocities.append(vel.copy())
            refs.append(z)
    return ComPath(np.array(times), np.array(positions), np.array(velocities), np.array(refs))


@dataclass(frozen=True)
class TransitionPlan:
    """Accepted plane height with the areas that certified the segment."""

    d_z: float
    problem: TrajProblem
    area_start: object
    area_end: object
    tested_heights: tuple = field(default_factory=tuple)


def plan_stance_transition(scene_start, scene_end, p_start, p_end, d_z_init,
                           margin=0.01, growth=1.5, cap=5.0, steps=100, dt=0.01,
                           sides=4):
    """Smallest scheduled plane height whose pendular areas contain the segment.

    The COM-to-plane distance starts at d_z_init - d_G and is multiplied by
    `growth` until both endpoint areas contain the segment with `margin`,
    or the distance exceeds `cap` (NoFeasiblePlane).
    """
    p_start = np.asarray(p_start, dtype=float).reshape(3)
    p_end = np.asarray(p_end, dtype=float).reshape(3)
    if abs(p_start[2] - p_end[2]) > 1e-9:
        raise ValueError("stance transition requires constant COM height")
    d_g = p_start[2]
    h = d_z_init - d_g
    if h <= 0.0:
        raise ValueError("initial plane must be above the COM")
    g_mag = abs(scene_start.gravity[2])
    tested = []
    while h <= cap + 1e-12:
        tested.append(d_g + h)
        plane = VirtualPlane(EZ, d_g + h)
        try:
            area_start = pendular_support_area_dd(scene_start.with_com(p_start), plane, sides)
            area_end = pendular_support_area_dd(scene_end.with_com(p_end), plane, sides)
        except (EmptyArea, DegeneratePlane):
            h *= growth
            continue
        seg = (p_start[:2], p_end[:2])
        if all(area.contains(q, margin=margin) for area in (area_start, area_end) for q in seg):
            mode = make_mode(d_g, plane.d_z, g_mag)
            problem = TrajProblem(p_start, p_end, steps, dt, mode)
            return TransitionPlan(plane.d_z, problem, area_start, area_end, tuple(tested))
        h *= growth
    raise NoFeasiblePlane(f"no plane height up to COM+{cap} m contains the segment")
