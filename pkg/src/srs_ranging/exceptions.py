"""Exception hierarchy shared by all modules."""


class SrsRangingError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SrsRangingError, ValueError):
    """One or more configuration constraints are violated.

    ``violations`` lists every broken rule as a ``(code, message)`` pair so
    callers can report all of them at once.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [("invalid configuration", violations)]
        self.violations = tuple(violations)
        super().__init__("; ".join(f"{code}: {msg}" for code, msg in self.violations))

    @property
    def codes(self):
        return tuple(code for code, _ in self.violations)


class ShapeError(SrsRangingError, ValueError):
    pass


class ChannelError(SrsRangingError, ValueError):
    pass


class NoSignalError(SrsRangingError):
    """Start detection found no energy in the capture."""


class UnresolvedPeaksError(SrsRangingError):
    """Fewer than two qualifying peaks in the range profile."""


class CaptureFormatError(SrsRangingError, ValueError):
    """IQ capture file or its metadata is malformed or inconsistent."""
