"""Exception types shared across the pipeline."""


class NudgeError(Exception):
    """Base class for all pipeline errors."""


class SampleRangeError(NudgeError):
    """An input sample fell outside [-1.0, 1.0]; the capture path is misconfigured."""


class DimensionError(NudgeError):
    """An array did not have the shape a contract requires."""


class EmptyInputError(NudgeError):
    """An operation that needs at least one element received none."""


class UnsupportedFormatError(NudgeError):
    """A file or frame is in a format this build does not read."""


class CorruptModelError(NudgeError):
    """A model file is truncated or internally inconsistent."""


class TrainingDivergedError(NudgeError):
    """Loss became NaN/Inf; the training run is aborted."""


class SplitTooSmallError(NudgeError):
    """Dataset too small to split into train/test."""


class SequencingError(NudgeError):
    """Chunk decisions arrived out of order; the session aborts."""


class ContractViolationError(NudgeError):
    """A caller broke an internal protocol (e.g. wrong window size)."""


class MalformedFrameError(NudgeError):
    """A wire frame could not be decoded.

    ``offset`` is the byte position of the first offending byte.
    """

    def __init__(self, message, offset=0):
        super().__init__(message)
        self.offset = offset


class DeviceUnreachableError(NudgeError):
    """The device did not answer within the transaction timeout (after retry)."""


class DeviceRejectedError(NudgeError):
    """The device answered with an error frame."""

    def __init__(self, message, reason=0):
        super().__init__(message)
        self.reason = reason


class SchemaViolationError(NudgeError):
    """An event payload contained non-scalar fields (privacy schema)."""


class PersistedStateError(NudgeError):
    """The event log could not be written or read."""


class StartupError(NudgeError):
    """A session could not be started (bad model path, unreachable device)."""


class NotFoundError(NudgeError):
    """Referenced session does not exist."""
