"""Exception hierarchy.

The command line maps these onto exit codes: configuration problems exit
with 2, unreadable input with 3 and numerical failures with 4.
"""


class TransientCPDError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(TransientCPDError, ValueError):
    """Invalid parameters or an inconsistent detector configuration."""


class InputParseError(TransientCPDError, ValueError):
    """A row of an input stream could not be parsed as an observation."""

    def __init__(self, row, text, reason=""):
        self.row = row
        self.text = text
        msg = f"row {row}: cannot parse {text!r} as an observation"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class NumericalError(TransientCPDError, ArithmeticError):
    """Base class for failures of a numerical routine."""


class DegenerateApproximationError(NumericalError, ValueError):
    """An approximation was evaluated outside the regime where it is defined."""


class QuadratureError(NumericalError):
    """Numerical integration failed to reach the requested tolerance."""


class ConvergenceError(NumericalError):
    """An iterative scheme (grid refinement, series) failed to converge."""


class CalibrationError(NumericalError):
    """A threshold search could not bracket or reach the target ARL."""


class SimulationError(NumericalError):
    """A Monte Carlo estimate is undefined (no usable replicates)."""


class UnsupportedCaseError(TransientCPDError, NotImplementedError):
    """The requested configuration has no formula in this package."""


class ApproximationWarning(UserWarning):
    """An approximation is being used where its accuracy is known to degrade."""
