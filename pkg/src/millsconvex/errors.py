"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a kernel or model."""


class SingularityError(ArithmeticError):
    """A quotient is evaluated where its denominator vanishes."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class QuadratureAccuracyError(ArithmeticError):
    """Adaptive quadrature exhausted its panel budget before converging.

    ``best`` carries the last estimate (a ``QuadratureResult``).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ModelConstructionError(ValueError):
    """A custom distribution failed its consistency check."""

    def __init__(self, message, worst_x=None, worst_error=None):
        super().__init__(message)
        self.worst_x = worst_x
        self.worst_error = worst_error


class GridEvaluationError(ArithmeticError):
    """A probed function failed at a grid point; ``x`` is the abscissa."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x
