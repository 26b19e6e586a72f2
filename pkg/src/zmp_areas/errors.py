"""Exception hierarchy shared across the package.

Everything derives from ComputationError so the CLI can map any
computational failure to a single exit code. Scene-format problems use a
separate class (different exit code).
"""


class ComputationError(Exception):
    """Base class for numerical/geometric failures."""


class SceneFormatError(Exception):
    """Scene file violates the expected JSON schema."""


# -- polyhedra ---------------------------------------------------------------

class InconsistentEqualities(ComputationError):
    """Equality system has no solution."""


class IterationLimit(ComputationError):
    """Double-description ray count exceeded the configured cap."""


class ScaleLimit(ComputationError):
    """Problem exceeds the size bounds of the brute-force oracle."""


# -- solvers -----------------------------------------------------------------

class CycleLimit(ComputationError):
    """Simplex exceeded its iteration cap."""


class MaxIterations(ComputationError):
    """Active-set QP exceeded its iteration cap."""


class SolverFailure(ComputationError):
    """A solver terminated without a usable status."""


# -- support areas -----------------------------------------------------------

class ZmpSingularity(ComputationError):
    """ZMP undefined: resultant force orthogonal to the plane normal."""


class NormalDegenerate(ComputationError):
    """Some wrench generator has (near-)zero virtual pressure."""


class EmptyPolygon(ComputationError):
    """No static equilibrium exists for the contact set."""


class EmptyArea(ComputationError):
    """No pendulum-mode-consistent contact forces exist."""


class UnboundedRegion(ComputationError):
    """A region expected to be a polygon is unbounded."""


class DegeneratePlane(ComputationError):
    """Virtual plane too close to the COM plane (or d_G == d_Z)."""


class UnboundedDirection(ComputationError):
    """Support-function LP unbounded: the area is conical."""


# -- pendulum ----------------------------------------------------------------

class TrajectoryInfeasible(ComputationError):
    """Trajectory QP constraints admit no solution."""


class NoFeasiblePlane(ComputationError):
    """No virtual-plane height in the search schedule contains the segment."""
