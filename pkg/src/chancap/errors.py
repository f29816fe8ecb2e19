"""Exception types shared across the package."""


class ChancapError(Exception):
    """Base class for all errors raised by chancap."""


class DimensionMismatchError(ChancapError):
    """Operands have incompatible dimensions."""


class InvariantViolation(ChancapError):
    """A constructed object fails one of its defining constraints.

    The message names the violated constraint and the measured deviation.
    """


class SupportError(ChancapError):
    """Relative entropy requested between operators with incompatible supports."""

    def __init__(self, message: str, eigenvector_index: int, overlap: float):
        super().__init__(message)
        self.eigenvector_index = eigenvector_index
        self.overlap = overlap


class ChannelSpecError(ChancapError):
    """A channel specification document is malformed."""
