"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """A parameter or configuration value violates its documented bounds."""


class EvaluationError(RuntimeError):
    """An integrand, derivative, or sweep evaluator failed at a known point.

    Attributes
    ----------
    where : float or int or None
        Abscissa (for quadrature/ODE faults) or grid index (for sweep
        faults) at which the evaluation failed.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class DeterminismError(RuntimeError):
    """Outputs produced with different worker counts disagree bitwise."""


class QuadratureWarning(RuntimeWarning):
    """A quadrature-backed quantity was computed from a non-converged result."""
