"""Exception hierarchy shared by the library and the CLI."""


class VcsatError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InvalidInputError(VcsatError, ValueError):
    exit_code = 2


class PreconditionError(InvalidInputError):
    """An operation was called on input outside its documented domain."""


class UnsupportedError(InvalidInputError):
    """No construction is provided for the requested parameters."""


class ResourceLimitError(VcsatError):
    """The requested exhaustive computation exceeds the built-in size guard."""

    exit_code = 3


class IndeterminateError(VcsatError):
    """A certified numeric bracket straddles zero."""

    exit_code = 4


class ConsistencyError(VcsatError, AssertionError):
    """An internal verification step failed. Indicates a bug."""

    exit_code = 1
