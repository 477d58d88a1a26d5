"""Exception types raised across the package."""


class StableTorsionError(Exception):
    """Base class for package errors."""


class DomainError(StableTorsionError, ValueError):
    """An argument lies outside the domain of an operation."""


class IntegrationError(StableTorsionError, ArithmeticError):
    """Quadrature failed to reach the requested tolerance."""


class ConvergenceError(StableTorsionError, ArithmeticError):
    """An iterative method did not converge."""


class StepBudgetExceeded(StableTorsionError, RuntimeError):
    """A Brownian path did not leave the domain within the step budget."""

    def __init__(self, message, partial_time=None):
        super().__init__(message)
        self.partial_time = partial_time


class ResurrectionCapExceeded(StableTorsionError, RuntimeError):
    """A resurrection run needed more restarts than allowed."""


class InsufficientTailError(StableTorsionError, RuntimeError):
    """Too few survivors to fit the exponential tail of an exit time."""


class ConfigError(StableTorsionError, ValueError):
    """Invalid experiment configuration."""


class InvariantViolation(StableTorsionError, AssertionError):
    """A pathwise invariant of a simulated record failed."""


class ConstructionError(DomainError):
    """A domain construction produced an empty interior."""
