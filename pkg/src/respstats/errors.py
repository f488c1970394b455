"""Exception taxonomy, mapped onto CLI exit codes.

Exit code classes: 2 usage (handled by the CLI parser), 3 file/format,
4 domain or degenerate data, 5 non-convergence.
"""


class RespstatsError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class DataFormatError(RespstatsError):
    """A file could not be read or does not conform to its format."""

    exit_code = 3


class BoundsError(RespstatsError):
    """A requested size or index is outside the valid range."""

    exit_code = 4


class DegenerateDataError(RespstatsError):
    """Input data carries no usable signal (zero variance, all-dead, ...)."""

    exit_code = 4


class InsufficientDataError(RespstatsError):
    """Too few samples for the requested estimator."""

    exit_code = 4


class ConvergenceError(RespstatsError):
    """An iterative fit exhausted its budget without meeting its target."""

    exit_code = 5
