"""Exception hierarchy shared by every module."""


class EigSmoothError(Exception):
    """Base class for all package errors."""


class DomainError(EigSmoothError, ValueError):
    """Evaluation point lies outside the function's domain."""


class CapabilityError(EigSmoothError):
    """A requested derivative (or other capability) is not available."""


class ResolutionError(EigSmoothError, ValueError):
    """Point lies below the finest materialized dyadic piece."""


class NumericalError(EigSmoothError, ArithmeticError):
    """Internal numerical failure (singular system, non-convergence)."""


class PoleError(NumericalError):
    """Transfer function evaluated on the spectrum of the state matrix."""


class PreconditionError(EigSmoothError, ValueError):
    """Input violates a documented precondition of a solver."""
