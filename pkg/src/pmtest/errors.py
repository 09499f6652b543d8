"""Exception types raised by the test engine and CLI."""


class PmtestError(Exception):
    """Base class for all package errors."""


class LengthMismatchError(PmtestError):
    """Input columns have different lengths."""


class UnknownInstrumentValueError(PmtestError):
    """An instrument coordinate is not in the declared support."""


class EmptyInstrumentCellError(PmtestError):
    """A cell of the instrument grid contains no observations."""


class DegenerateTreatmentError(PmtestError):
    """The treatment takes fewer than two distinct values."""


class DivisionByZeroCellError(PmtestError):
    """A cell probability of zero reached a moment computation."""


class EmptyCandidateSetError(PmtestError):
    """No candidate directions survive; the sup is undefined."""


class EmptyBootstrapCellError(PmtestError):
    """A bootstrap resample left an instrument cell empty."""


class ExcessiveRedrawsError(PmtestError):
    """Too many consecutive invalid resamples or simulated datasets."""


class UnknownDgpError(PmtestError):
    """Requested data generating process name is not registered."""


class UnknownColumnError(PmtestError):
    """A required column is missing from the input table."""


class EmptyReportError(PmtestError):
    """No Monte Carlo reports were given to the table emitter."""
