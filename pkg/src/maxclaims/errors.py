"""Exception types shared across the package."""


class MaxclaimsError(Exception):
    """Base class for all package errors."""


class ParameterError(MaxclaimsError, ValueError):
    """A distribution or copula parameter lies outside its domain."""


class BoundaryError(MaxclaimsError, ValueError):
    """Evaluation requested exactly on the unit-square boundary where a density may diverge."""


class ConvergenceError(MaxclaimsError, RuntimeError):
    """A numerical root-finder or iteration failed to converge."""


class UnsupportedError(MaxclaimsError, ValueError):
    """Requested combination (family, dimension, ...) is not supported."""


class DataError(MaxclaimsError, ValueError):
    """Input data violates the dataset contract (shape, sign, censor flags)."""


class InsufficientDataError(DataError):
    """Too few (or no usable) observations for the requested statistic."""


class OptimizationError(MaxclaimsError, RuntimeError):
    """No optimizer start converged.  Carries the best point found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class AllocationError(MaxclaimsError, ValueError):
    """Covariance allocation is undefined (degenerate largest-claim variance)."""
