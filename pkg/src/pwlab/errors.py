"""Exception types. Numerical failures map to CLI exit code 2, usage errors to 1."""


class UsageError(ValueError):
    """Bad user input: malformed flags, grids, files."""


class NumericalError(ArithmeticError):
    """A computation left its valid regime (overflow, failed quadrature)."""


class QuadratureError(NumericalError):
    def __init__(self, message, estimate=None):
        super().__init__(message if estimate is None else f"{message} (error estimate {estimate:.3g})")
        self.estimate = estimate
