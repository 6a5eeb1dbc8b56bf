"""Exception hierarchy shared across the toolkit.

Split along the CLI exit-code contract: bad input data or configuration
(exit 1) versus solver/fitter failures on well-formed input (exit 2).
"""


class CqedkitError(Exception):
    """Base class for all toolkit errors."""


class InputDataError(CqedkitError):
    """Malformed file, config, or argument (CLI exit code 1)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class ConfigError(InputDataError):
    """Invalid or unknown configuration keys/values."""


class SolverError(CqedkitError):
    """Numerical solver or fitter failure (CLI exit code 2)."""


class TruncationError(SolverError):
    """Basis/grid too small: refinement check moved f01 by >= 0.01 MHz."""


class NoSolutionError(SolverError):
    """Root-find target outside the attainable range."""

    def __init__(self, message, attainable=None):
        super().__init__(message)
        # (value at upper bound, value at lower bound) of the search interval
        self.attainable = attainable


class FitError(SolverError):
    """A fitter could not produce a usable result."""


class NoResonanceError(FitError):
    """Reflection trace has no dip above the noise floor."""


class NoDipError(FitError):
    """Scalar spectrum has no dip above the noise floor."""


class FitInitError(FitError):
    """Initial-guess machinery found nothing to lock onto."""


class NotConvergedError(FitError):
    """Optimizer stopped without meeting the convergence criteria."""
