"""Exception hierarchy shared by all modules."""


class QpisdeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(QpisdeError, ValueError):
    """An argument violates a documented precondition."""


class SingularStepError(QpisdeError, ArithmeticError):
    """A one-step update has a vanishing denominator (e.g. mu*dt = 1)."""


class SingularBlockError(SingularStepError):
    """The two-step block system is singular for the given mu*dt."""
