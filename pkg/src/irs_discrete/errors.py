"""Exception hierarchy shared by the library and the CLI."""


class IRSError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(IRSError, ValueError):
    """Inputs violate a documented precondition (shapes, ranges, names)."""


class InstanceTooLargeError(InvalidInputError):
    """Exhaustive enumeration was requested for an instance that is too big."""


class NumericalError(IRSError, ArithmeticError):
    """A computation hit a numerically degenerate configuration."""


class DegenerateChannelError(NumericalError):
    """The combined channel is identically zero, so no beam direction exists."""


class InfeasibleLinkError(NumericalError):
    """The SNR target cannot be met with finite transmit power."""
