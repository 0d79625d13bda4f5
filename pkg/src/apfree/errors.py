"""Exception types shared across the package."""


class ApfreeError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(ApfreeError, ValueError):
    """An argument violates an operation precondition."""


class ResourceLimitError(ApfreeError, RuntimeError):
    """A requested computation exceeds a configured resource limit."""


class NumericDomainError(ApfreeError, ValueError):
    """A formula was evaluated outside its numeric domain."""


class SetFileFormatError(ApfreeError, ValueError):
    """A set file violates the one-integer-per-line format."""
