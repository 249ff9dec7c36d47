"""Exception types raised by randtt.

Plain argument problems raise ``ValueError``; the classes below cover the
failure modes callers may want to catch separately.
"""


class InvalidStructureError(ValueError):
    """TT cores whose rank extents do not chain together."""


class FormatError(ValueError):
    """A DNT1/TTC1 file that is truncated or has the wrong magic."""


class NumericError(ArithmeticError):
    """Non-finite values encountered during a factorization."""


class DegenerateInputError(ValueError):
    """A matrix is numerically rank deficient where full rank is required."""


class ResourceLimitError(MemoryError):
    """An operation was refused because its input exceeds a size guard."""
