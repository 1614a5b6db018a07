"""Exception hierarchy shared across the package."""


class OrdertailError(Exception):
    """Base class for all package-specific errors."""


class DomainError(OrdertailError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(OrdertailError, ValueError):
    """A model, matrix, scenario, or input file fails a structural invariant."""


class InvalidOrderingError(ValidationError):
    """A portfolio component has a strictly heavier tail than the reference risk."""


class ModelConsistencyError(ValidationError):
    """Analytic and numeric views of a model disagree beyond tolerance."""


class UnsupportedOperationError(OrdertailError):
    """The operation is not defined for this model class or method precondition."""


class NumericError(OrdertailError):
    """A numeric routine failed to reach its target tolerance.

    Attributes:
        achieved_tol: best relative tolerance reached before giving up.
    """

    def __init__(self, message, achieved_tol=None):
        super().__init__(message)
        self.achieved_tol = achieved_tol


class InsufficientSamplesError(OrdertailError, ValueError):
    """Too few samples to estimate the requested quantile."""
