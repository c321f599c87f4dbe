class HsumError(Exception):
    """Base class for all hsumlab errors."""


class DomainError(HsumError, ValueError):
    """An argument lies outside the operation's domain."""


class AliasingError(DomainError):
    """Requested Fourier degree is not resolved by the grid."""


class ShapeError(HsumError, ValueError):
    """Inputs that must share one grid do not."""


class CapacityError(HsumError):
    """Exact rational representation would grow past the configured limit."""


class UsageError(HsumError):
    """Bad command-line or configuration input."""
