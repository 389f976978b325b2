"""Exception types shared across the package.

The convention throughout: malformed *inputs* (empty data, nonpositive
values where positivity is required, probabilities outside (0, 1)) raise;
parameter values that merely violate a model constraint make likelihoods
return ``-inf`` instead, so optimizers and samplers can reject them
uniformly.
"""


class EvscaleError(Exception):
    """Base class for package-specific errors."""


class DomainError(EvscaleError, ValueError):
    """An input value lies outside the mathematical domain of an operation."""


class UsageError(EvscaleError, ValueError):
    """An operation was called in a way that does not make sense (API misuse)."""


class NumericalError(EvscaleError, RuntimeError):
    """A numerical routine failed (bracketing, overflow, no root found)."""


class NonConvergenceError(NumericalError):
    """An iterative fit failed to converge; carries the best state found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
