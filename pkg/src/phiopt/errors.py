"""Exception types raised across the package."""


class PhiOptError(Exception):
    """Base class for every error raised by phiopt."""


class ShapeError(PhiOptError, ValueError):
    """A matrix or vector has the wrong shape."""


class RangeError(PhiOptError, ValueError):
    """A probability lies outside [0, 1] or a state bit is not binary."""


class InfeasibleNetworkError(PhiOptError):
    """No state of the network admits a well-defined Phi."""


class UndefinedRepertoireError(InfeasibleNetworkError):
    """The mechanism's current state has zero probability under every past state."""


class BudgetError(PhiOptError):
    """Node count exceeds the configured guardrail."""


class InsufficientDataError(PhiOptError, ValueError):
    """Too few observations for the requested statistic."""
