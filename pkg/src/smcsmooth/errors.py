"""Exception types raised across the package."""


class SMCError(Exception):
    """Base class for all package errors."""


class DegenerateWeightsError(SMCError):
    """All potentials are zero at some time step."""


class NumericError(SMCError, FloatingPointError):
    """NaN or non-finite values appeared in states, weights or densities."""


class DegenerateKernelError(SMCError):
    """A backward kernel row has a zero normalising constant."""


class BoundViolationError(SMCError):
    """A transition density exceeded the declared upper bound."""


class UnsupportedOperationError(SMCError, NotImplementedError):
    """The model lacks an ingredient the requested algorithm needs."""


class StorageBudgetError(SMCError, MemoryError):
    """Offline storage of all particle clouds would exceed the configured cap."""


class ConfigError(SMCError, ValueError):
    """Invalid experiment configuration."""
