"""Exception hierarchy.

Each class maps onto one CLI exit code, see :mod:`factorforge.cli`.
"""


class FactorForgeError(Exception):
    """Base class for all library errors."""


class InvalidInputError(FactorForgeError, ValueError):
    """Malformed graph, subset, vector or instance file."""


class PreconditionError(FactorForgeError):
    """A hypothesis of one of the extension theorems does not hold."""


class ExchangeNotFoundError(PreconditionError):
    """No edge at the pivot admits a connectivity-preserving swap."""


class CapacityError(FactorForgeError):
    """An exhaustive search was asked to run above its configured cap."""
