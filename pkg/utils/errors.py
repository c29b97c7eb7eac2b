class ConvergenceWarning(UserWarning):
    """An iterative solver stopped at its cap before reaching its tolerance."""


class ModelValidationError(ValueError):
    """Model or configuration parameters violate a required bound."""


class MonotonicityError(RuntimeError):
    """A threshold search met a gap function that is not monotone."""


class NoSignChangeError(ValueError):
    """An equilibrium bracket does not straddle a root."""


class UniquenessViolation(RuntimeError):
    """Several equilibrium candidates were found where at most one may exist."""
