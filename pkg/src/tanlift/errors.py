"""Exception types raised across the package."""

from .jets import DomainError


class ModelError(ValueError):
    """The metric model is not a Riemannian metric at the requested point."""


class ChartError(ValueError):
    """A point lies outside the admissible chart domain."""


class SlitBundleError(ValueError):
    """A tangent vector ``y`` is zero where the slit bundle is required."""


class DegeneracyError(ArithmeticError):
    """A bilinear form that must be nondegenerate is singular."""


class UsageError(ValueError):
    """Bad user input to the verification driver."""


__all__ = [
    "DomainError",
    "ModelError",
    "ChartError",
    "SlitBundleError",
    "DegeneracyError",
    "UsageError",
]
