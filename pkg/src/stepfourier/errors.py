"""Exception types raised across the package."""


class StepFourierError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(StepFourierError, ValueError):
    """Non-finite or structurally invalid numeric input."""


class SpectralOverflowError(StepFourierError, OverflowError):
    """An exponent or power left the range of double precision.

    Attributes carry whatever is known about the offending quantity so the
    solver can turn the failure into a divergence note.
    """

    def __init__(self, message, *, k=None, n=None, sigma=None, t=None, exponent=None):
        super().__init__(message)
        self.k = k
        self.n = n
        self.sigma = sigma
        self.t = t
        self.exponent = exponent


class DomainError(StepFourierError, ValueError):
    """A point lies outside the domain where an operation is defined."""


class UnavailableValueError(StepFourierError):
    """The requested value lives in a cell flagged as overflowing."""

    def __init__(self, message, note=None):
        super().__init__(message)
        self.note = note


class ProblemSyntaxError(StepFourierError, ValueError):
    """The problem document is not well-formed JSON."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ProblemValidationError(StepFourierError, ValueError):
    """The problem violates one or more schema or semantic rules.

    ``diagnostics`` lists every violation found, not just the first.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class UnsupportedOrderError(StepFourierError, ValueError):
    """The finite-difference oracle only handles operators of order <= 2."""


class FDConfigError(StepFourierError, ValueError):
    """Finite-difference configuration violates the stability bound."""
