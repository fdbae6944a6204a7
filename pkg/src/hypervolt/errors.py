"""Exception hierarchy.

Validation problems (bad input, inadmissible exponents) derive from
:class:`ValidationError`; numeric failures (poles hit, non-convergence,
overflow) derive from :class:`NumericalError`. The CLI maps the two families
to exit codes 2 and 3.
"""

from __future__ import annotations


class HypervoltError(Exception):
    """Base class for all package errors."""


class ValidationError(HypervoltError, ValueError):
    """Input violates a documented precondition."""


class InadmissibleLambdaError(ValidationError):
    """Kernel exponent is (numerically) one of 0, -1, -2, ..."""


class DomainError(ValidationError):
    """Argument outside the domain of an operation (e.g. Re p <= 0)."""


class UnsupportedError(ValidationError):
    """Valid input that the requested operation deliberately does not cover."""


class NumericalError(HypervoltError, ArithmeticError):
    """A numeric procedure could not deliver its contract."""


class PoleError(NumericalError):
    """Evaluation at or too close to a pole."""


class GammaPoleError(PoleError, ValueError):
    """Gamma evaluated at a nonpositive integer."""


class ContourPoleError(PoleError):
    """A singularity of the transform lies on (or next to) an inversion node."""


class ConvergenceError(NumericalError):
    """Series, quadrature or refinement failed to reach its tolerance."""

    def __init__(self, message: str, achieved: float | None = None) -> None:
        super().__init__(message)
        self.achieved = achieved


class InversionOverflowError(NumericalError, OverflowError):
    """Inversion nodes leave the double-precision range."""
