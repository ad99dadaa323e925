"""Exception and warning types raised across the package."""


class GfrsampError(Exception):
    """Base class for all errors raised by gfrsamp."""


class NonHermitian(GfrsampError, ValueError):
    pass


class NonUnitary(GfrsampError, ValueError):
    pass


class NoConvergence(GfrsampError, ArithmeticError):
    pass


class BranchPole(GfrsampError, ZeroDivisionError):
    """A zero eigenvalue was raised to a non-positive power."""


class DimensionMismatch(GfrsampError, ValueError):
    pass


class DisconnectedAfterRetries(GfrsampError, RuntimeError):
    pass


class SingularSubproblem(GfrsampError, ArithmeticError):
    """A sampling objective needs an inverse or determinant that does not exist."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class NotPSD(GfrsampError, ValueError):
    pass


class IllConditioned(UserWarning):
    """Recovery accuracy is not guaranteed for this sampling set."""
