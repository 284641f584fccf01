from typing import Optional


class SyncSimError(Exception):
    """Base class for every error raised by the synchronization simulator."""


class TimingDomainError(SyncSimError, ValueError):
    """A precondition of a timing or error-model operation was violated."""


class TaSaturationError(TimingDomainError):
    """
    A timing-advance index fell outside the range of its command mode.

    Args:
        raw_index (int): The unclamped index that was computed.
        clamped: The TaCommand clamped into the valid range, for callers that
            prefer to saturate instead of failing.
    """

    def __init__(self, raw_index: int, clamped, message: Optional[str] = None):
        self.raw_index = raw_index
        self.clamped = clamped
        super().__init__(
            message
            or f"TA index {raw_index} outside {clamped.mode.value} range "
               f"(clamped to {clamped.index})"
        )


class ConfigError(SyncSimError, ValueError):
    """Invalid configuration: unknown key, bad value or out-of-range number."""
