"""Exception types raised by the processing chain."""


class ChanSounderError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(ChanSounderError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateCalibration(ChanSounderError):
    """The back-to-back calibration spectrum is identically zero."""


class AllSnapshotsRejected(ChanSounderError):
    """Every CIR at a position fell below the SNR gate."""


class EmptyMpcSet(ChanSounderError):
    """No delay bin exceeded the multipath decision threshold."""


class DegenerateGeometry(ChanSounderError):
    """A path-loss fit was requested with all samples at one distance."""


class InsufficientSamples(ChanSounderError):
    """Too few samples for a statistical estimate."""


class FormatError(ChanSounderError):
    """A capture file is malformed or truncated."""


class MissingCalibration(ChanSounderError):
    """No calibration capture found for a requested band."""
