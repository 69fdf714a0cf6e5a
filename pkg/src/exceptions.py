"""
Exception hierarchy for fixedb-calib
"""


class FixedBError(Exception):
    """Base class for every error raised by the package."""


class SpecError(FixedBError, ValueError):
    """A model, block, second-stage or experiment specification is invalid."""


class SegmentError(FixedBError, ValueError):
    """A segment (start, length) does not fit inside the series."""


class EstimationError(FixedBError, ValueError):
    """A statistic is undefined on the given data."""


class TableDomainError(FixedBError, ValueError):
    """A critical-value lookup fell outside the stored table."""


class CalibrationError(FixedBError, ValueError):
    """Calibration could not produce a usable level, fit or window."""


class EnumerationError(FixedBError, ValueError):
    """Exact bootstrap enumeration was requested for a series that is too long."""
