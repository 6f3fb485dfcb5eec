"""Exception hierarchy shared by every aoilab module."""


class AoiLabError(Exception):
    """Base class for all errors raised by aoilab."""


class DomainError(AoiLabError, ValueError):
    """An argument lies outside the range where the model is defined."""


class ConvergenceError(AoiLabError, RuntimeError):
    """An iterative solver did not reach its tolerance within the iteration cap."""


class CapacityError(AoiLabError):
    """A truncated state space would exceed the configured size limit."""


class NondegeneracyError(AoiLabError):
    """The chain induced by a policy has more than one closed recurrent class."""
