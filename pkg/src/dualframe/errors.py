"""Exception hierarchy shared by every layer of the package."""


class DualFrameError(Exception):
    """Base class for all errors raised by :mod:`dualframe`."""


class NotHermitian(DualFrameError):
    pass


class NoConvergence(DualFrameError):
    pass


class InvalidDimensions(DualFrameError):
    pass


class SingularFrameOperator(DualFrameError):
    pass


class DimensionMismatch(DualFrameError):
    pass


class NotADual(DualFrameError):
    """Raised when a candidate fails the reconstruction identity.

    The measured residual ``||T_G^* T_F - I||_F`` is kept on the instance so
    callers (the CLI in particular) can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotOneUniform(DualFrameError):
    pass


class PatternBudgetExceeded(DualFrameError):
    pass


class HypothesisViolated(DualFrameError):
    pass


class UnknownCheckId(DualFrameError):
    pass
