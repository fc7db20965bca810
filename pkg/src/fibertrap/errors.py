"""Exception hierarchy shared by the numerical modules and the CLI."""


class FiberTrapError(Exception):
    """Base class for all package errors."""


class InvalidInputError(FiberTrapError, ValueError):
    """A parameter is outside its physical range (negative power, radius...)."""


class DomainError(FiberTrapError, ValueError):
    """A position lies outside the region where a formula applies."""


class MultimodeError(FiberTrapError):
    """The fiber supports more than the fundamental mode (V >= 2.405)."""


class NoGuidedModeError(FiberTrapError):
    """The HE11 dispersion relation has no bracketed root."""


class ConvergenceError(FiberTrapError):
    """A series or quadrature did not reach its tolerance within budget.

    ``partial`` carries the best estimate available when the budget ran out.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoTrapError(FiberTrapError):
    """The potential has no interior minimum outside the fiber."""


class SaddlePointError(FiberTrapError):
    """The curvature at a stationary point is not positive definite."""
