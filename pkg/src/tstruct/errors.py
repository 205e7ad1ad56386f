"""Exception types raised across the package."""


class TStructError(Exception):
    """Base class for all package errors."""


class InputError(TStructError, ValueError):
    """Malformed or inconsistent input (unknown label, bad order, bad document)."""


class ResourceError(TStructError):
    """A size guard was exceeded."""


class PreconditionError(TStructError, ValueError):
    """An operation was called outside the hypotheses it is defined under."""
