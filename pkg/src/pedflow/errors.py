"""Exception types shared across the package."""


class PedflowError(Exception):
    """Base class for every error raised by this package."""


class SelfLoop(PedflowError):
    """An edge connects a vertex to itself."""


class DuplicateEdge(PedflowError):
    """The same unordered vertex pair appears twice in the edge list."""


class NonPositiveWeight(PedflowError):
    """An edge weight is zero, negative, or not finite."""


class Disconnected(PedflowError):
    """The graph does not connect every vertex to every other."""


class EmptyBoundary(PedflowError):
    """The target vertex set is empty."""


class DomainError(PedflowError):
    """A density or flux argument left [0, 1]; usually an upstream bound bug."""


class NoConvergence(PedflowError):
    """The potential solver hit its iteration cap before reaching tolerance."""


class CflViolation(PedflowError):
    """The transport time step breaks lam * D * ||m|| <= 1."""

    def __init__(self, message, max_dt=None):
        super().__init__(message)
        self.max_dt = max_dt


class DiffusionCflViolation(PedflowError):
    """The diffusion step breaks eps * lam_d * D <= 1/2."""

    def __init__(self, message, max_dt=None):
        super().__init__(message)
        self.max_dt = max_dt


class BoundsViolation(PedflowError):
    """A density update left [0, 1] beyond the rounding band."""


class DegenerateEdge(PedflowError):
    """Discretization produced zero segments for a network edge."""


class DensityOutOfRange(PedflowError):
    """A sampled initial density falls outside [0, 1)."""


class ParseError(PedflowError):
    """A scenario or snapshot file could not be parsed."""


class ScenarioInvalid(PedflowError):
    """A scenario parsed but fails semantic validation."""
