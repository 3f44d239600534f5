"""Exception hierarchy.

Validation problems subclass :class:`ValueError` so callers that only care
about bad input can catch the builtin.  :class:`InvariantViolation` marks a
library defect: a mathematical identity that should hold by construction did
not.
"""


class SpecGraphError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SpecGraphError, ValueError):
    """Input failed validation."""


class VertexRangeError(ValidationError):
    pass


class SelfLoopError(ValidationError):
    pass


class DuplicateEdgeError(ValidationError):
    pass


class NonPositiveWeightError(ValidationError):
    pass


class DegenerateDegreeError(ValidationError):
    """A vertex of degree zero where a degree normalization is required."""


class DisconnectedGraphError(ValidationError):
    pass


class InfeasibleParameterError(ValidationError):
    pass


class ConvergenceError(SpecGraphError, RuntimeError):
    pass


class InvariantViolation(SpecGraphError, RuntimeError):
    """An identity that holds by construction failed numerically."""
