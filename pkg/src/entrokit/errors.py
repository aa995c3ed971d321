"""Exception taxonomy shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedPathError(DomainError):
    """The requested evaluation route does not exist for these parameters."""


class BudgetError(RuntimeError):
    """Evaluation budget exhausted before the tolerance was reached."""


class SeriesCancellationError(ArithmeticError):
    """Catastrophic floating-point cancellation detected in a series.

    The series route reports failure instead of returning garbage; callers
    are expected to fall back to an integral route.
    """


class QuadratureDivergenceError(RuntimeError):
    """Semi-infinite tail failed to decay within the doubling budget."""


class PrecisionError(ArithmeticError):
    """Working precision insufficient for the requested computation."""


class IncompleteSupportError(ValueError):
    """Truncated support misses too much probability mass."""
