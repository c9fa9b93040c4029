"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: parameter/input problems
exit 2, depth/size/coverage problems exit 3, and a failed mathematical
certification exits 1.
"""


class FrameFieldError(Exception):
    """Base class for all package errors."""


class ParameterError(FrameFieldError):
    """Invalid or mismatched parameters (bad field spec, shape mismatch, bad input file)."""


class RangeError(ParameterError):
    """A scalar argument is outside its admissible range."""


class DepthError(FrameFieldError):
    """A grid depth does not cover the support of the masks involved."""


class SizeError(FrameFieldError):
    """A requested enumeration would not fit in memory."""


class CoverageError(DepthError):
    """A sampled function grid does not cover the points a computation needs."""


class ConstructionError(FrameFieldError):
    """A construction was rejected; carries the failing certification report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
