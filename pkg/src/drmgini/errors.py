"""Exception types shared across the package."""


class DrmGiniError(Exception):
    """Base class for all errors raised by this package."""


class DataError(DrmGiniError):
    """Input data could not be parsed or fails validation."""


class DegenerateDataError(DataError):
    """Data are too degenerate for the requested statistic.

    Raised e.g. when a group has fewer than two positive observations,
    when all positive values coincide so the density ratio parameters
    are unidentifiable, or when a whole-sample mean is zero.
    """


class ConvergenceError(DrmGiniError):
    """Iterative fitting failed to converge.

    Carries the last iterate and diagnostics so callers can inspect
    what went wrong.
    """

    def __init__(self, message, theta=None, grad_norm=None, iterations=None):
        super().__init__(message)
        self.theta = theta
        self.grad_norm = grad_norm
        self.iterations = iterations


class RankDeficiencyError(DrmGiniError):
    """A matrix that must be invertible is numerically rank deficient."""


class SingularityError(DrmGiniError):
    """A transform was requested at a point where it is not differentiable."""


class OpenBoundError(DrmGiniError):
    """A confidence bound could not be bracketed inside the feasible hull."""


class StudyError(DrmGiniError):
    """A simulation study had too many failed replications to be trusted."""
