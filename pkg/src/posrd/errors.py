"""Exception hierarchy shared by the solvers and the command line."""


class PosrdError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(PosrdError, ValueError):
    """A state vector or field has the wrong length."""


class DomainError(PosrdError, ValueError):
    """An evaluator was called outside the set where it is defined."""


class PreconditionError(PosrdError, ValueError):
    """An input violates an operation's stated precondition."""


class StabilityError(PosrdError, ValueError):
    """A diffusion step would break the linear stability bound."""

    def __init__(self, message, ratio=None):
        super().__init__(message)
        self.ratio = ratio


class NonConvergenceError(PosrdError, RuntimeError):
    """Successive approximation did not reach its tolerance."""

    def __init__(self, message, last_difference, trajectory=None, differences=()):
        super().__init__(message)
        self.last_difference = last_difference
        self.trajectory = trajectory
        self.differences = list(differences)


class ConfigError(PosrdError, ValueError):
    """A run configuration could not be parsed or validated."""
