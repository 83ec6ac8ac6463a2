"""Exception types raised by privmarket."""


class InputError(ValueError):
    """Raised when a caller passes parameters outside an operation's domain."""


class InternalError(RuntimeError):
    """Raised when an invariant that valid inputs guarantee is violated."""
