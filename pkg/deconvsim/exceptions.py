"""Exceptions raised across deconvsim."""


class DeconvError(Exception):
    """
    Base class of every error raised by the deconvolution library.
    """


class ParameterDomainError(DeconvError, ValueError):
    """
    Exception raised when a parameter lies outside its admissible domain.
    """


class NoDensityError(DeconvError, ValueError):
    """
    Exception raised when a density is requested from a law with an atom.
    """


class ModelClassError(DeconvError, ValueError):
    """
    Exception raised when a coefficient series is not a valid candidate
    characteristic function (constant term not 1, broken Hermitian symmetry).
    """


class UnsupportedInitializationError(DeconvError, ValueError):
    """
    Exception raised when the optimizer cannot build its starting point.
    """


class DegenerateParametersError(DeconvError, ValueError):
    """
    Exception raised when the theoretical parameter formulas give m = 0.
    """


class InternalConsistencyError(DeconvError):
    """
    Exception raised when a numerical result violates a structural guarantee,
    e.g. a Fourier inversion of a Hermitian function with a large imaginary part.
    """


class NumericalFailureError(DeconvError):
    """
    Exception raised when the criterion diverges during a fit.
    The offending coefficient vector is kept in `iterate`.
    """

    def __init__(self, message: str, iterate=None):
        super().__init__(message)
        self.iterate = iterate


class DatasetFormatError(DeconvError, ValueError):
    """
    Exception raised when a paired dataset file cannot be parsed.
    """

    def __init__(self, message: str, line: int = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
