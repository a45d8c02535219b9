"""Exception hierarchy.

Every error carries a short ``code`` string; the command-line runner prints
it next to the message and maps the class to an exit status.
"""


class DeltaKickError(Exception):
    """Base class for all package errors."""

    code = "error"


class ConfigurationError(DeltaKickError, ValueError):
    """A scenario or scale is missing fields or has invalid values."""

    code = "config"


class PreconditionError(DeltaKickError, ValueError):
    code = "precondition"


class DomainError(DeltaKickError, ValueError):
    code = "domain"


class GridOverflowError(DeltaKickError):
    """The state would spread past the safe region of the grid."""

    code = "grid-overflow"


class ResourceError(DeltaKickError):
    code = "resource"


class DegenerateLensError(DeltaKickError):
    """Kick widths too close together (or system too ill-conditioned) to design."""

    code = "degenerate-lens"


class SingularityError(DeltaKickError):
    code = "singularity"


class OptimizationError(DeltaKickError):
    """Raised when a trial point of the optimizer cannot be simulated."""

    code = "optimization-failure"

    def __init__(self, message, strengths=None):
        super().__init__(message)
        self.strengths = None if strengths is None else tuple(float(k) for k in strengths)
