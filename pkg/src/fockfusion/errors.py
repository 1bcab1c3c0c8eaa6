"""Exception types shared across the package."""


class FockFusionError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FockFusionError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class PrecisionError(FockFusionError, ArithmeticError):
    """A numerical result failed its accuracy check even after escalation."""


class CapacityError(FockFusionError, ValueError):
    """A validation-only routine was asked for more photons than its cap."""
