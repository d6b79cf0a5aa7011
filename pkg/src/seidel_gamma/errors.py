"""Exception types shared across the package."""


class SeidelGammaError(Exception):
    """Base class for every error raised by this package."""


class ParameterMismatchError(SeidelGammaError, ValueError):
    """Operands were built for different mu, floors or presentations."""


class NotInvertibleError(SeidelGammaError, ArithmeticError):
    """Raised when an inverse does not exist at working precision.

    ``zero_divisor`` is True when enlarging the window left the pivot
    structure unchanged (a genuine zero divisor), False when the failure
    went away or changed with a larger window (insufficient precision),
    and None when no retry was attempted.
    """

    def __init__(self, message, zero_divisor=None):
        super().__init__(message)
        self.zero_divisor = zero_divisor


class InvalidParameterError(SeidelGammaError, ValueError):
    pass


class UnsupportedRegimeError(SeidelGammaError, ValueError):
    """The requested mu lies outside the range where Seidel data is known."""


class OutOfRangeError(SeidelGammaError, ValueError):
    """A closed form was queried below the exponent where it holds."""


class InsufficientDataError(SeidelGammaError, ValueError):
    pass


class NonPiecewiseLinearError(SeidelGammaError, ValueError):
    """Adjacent fitted pieces do not meet inside the gap between them."""

    def __init__(self, message, interval):
        super().__init__(message)
        self.interval = interval
