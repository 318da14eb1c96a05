"""Exception types shared across the package."""


class GspmError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(GspmError, ValueError):
    """An argument violates a documented precondition."""


class DimensionMismatchError(InvalidArgumentError):
    """Point or sample dimensionality does not match the slicer."""


class SingularGradientError(GspmError, ArithmeticError):
    """Gradient requested at a point where it is undefined.

    Raised for the circular slicer at its center; a silent zero vector
    would corrupt drift computations downstream.
    """


class UnsupportedConfigError(GspmError, ValueError):
    """The (operator, smoothing) pair has no evaluation strategy."""


class SliceRangeError(GspmError, ValueError):
    """A slice value falls outside the cumulative operator's domain."""


class NumericalError(GspmError, ArithmeticError):
    """A computation produced a non-finite intermediate result."""


class FlowDivergenceError(NumericalError):
    """A particle coordinate became non-finite during flow iteration."""

    def __init__(self, message, iteration=None, eta=None, log=None):
        super().__init__(message)
        self.iteration = iteration
        self.eta = eta
        self.log = log
