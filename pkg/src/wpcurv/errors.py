"""Exception hierarchy shared by all pipeline stages."""


class WpcurvError(Exception):
    """Base class for all package-specific failures."""


class UnsupportedGenus(WpcurvError):
    """Requested a surface genus for which no validated model exists."""


class BudgetExceeded(WpcurvError):
    """Word enumeration would exceed the configured element cap."""


class NearPole(WpcurvError):
    """Moebius evaluation too close to the pole of the transformation."""


class ConvergenceFailure(WpcurvError):
    """Truncated series tail estimate exceeds the configured tolerance."""


class DegenerateBasis(WpcurvError):
    """Gram matrix numerically singular: candidate fields not independent."""


class MeshBudget(WpcurvError):
    """Mesh refinement would exceed the configured node cap."""


class SingularMass(WpcurvError):
    """A lumped quadrature weight is non-positive."""


class SolverFailure(WpcurvError):
    """A linear solve missed its residual tolerance."""


class KernelBudget(WpcurvError):
    """Dense Green-kernel matrix would exceed the configured memory cap."""


class SymmetryViolation(WpcurvError):
    """A curvature-tensor symmetry residual exceeds tolerance."""


class TypeImbalance(WpcurvError):
    """Internal consistency failure in the holomorphic-type bookkeeping."""


class PositiveModeDetected(WpcurvError):
    """The wedge operator has an eigenvalue above the zero tolerance."""


class KernelDimMismatch(WpcurvError):
    """Wedge-operator kernel dimension differs from the predicted n(n-1)."""


class DimensionMismatch(WpcurvError):
    """Tangent vectors have the wrong dimension for the requested model."""
