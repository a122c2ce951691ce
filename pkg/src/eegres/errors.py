"""Exception hierarchy shared by all eegres modules.

Input errors map to CLI exit code 1, numerical failures to exit code 2.
"""

from __future__ import annotations


class EegresError(Exception):
    """Base class for all eegres errors."""

    exit_code = 1

    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(message)


class InputError(EegresError):
    """Invalid input data, arguments or files."""

    exit_code = 1


class NumericalError(EegresError):
    """A numerical routine could not produce a valid result."""

    exit_code = 2


class BundleError(InputError):
    """Raised when a dataset bundle cannot be read or written."""


class SignalError(InputError):
    """Raised when a signal violates its invariants or an operation's bounds."""


class FeatureError(InputError):
    """Raised when a feature configuration cannot be applied to a signal."""


class FoldError(InputError):
    """Raised when cross-validation folds cannot be built or trained."""


class GridError(InputError):
    """Raised when no resolution configuration is feasible."""


class ConvergenceError(NumericalError):
    """Raised when an iterative solver hits its iteration cap."""


class ZeroVarianceError(NumericalError):
    """Raised when a statistic is undefined because the data is constant."""


class ReportError(InputError):
    """Raised when a sweep report cannot be written or read back."""
