"""Exception hierarchy shared by every module."""


class ExtremeGapsError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(ExtremeGapsError, ValueError):
    """Invalid parameters, configuration, or input data."""


class NumericalError(ExtremeGapsError, ArithmeticError):
    """A numerical routine failed or produced an untrustworthy result."""


class ConvergenceError(NumericalError):
    """An iterative method hit its iteration or refinement cap."""


class UnitarityError(NumericalError):
    """A sampled unitary matrix has eigenvalues off the unit circle."""
