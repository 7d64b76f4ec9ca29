"""Exception types raised across the package."""


class BeamTrainingError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(BeamTrainingError, ValueError):
    pass


class InvalidStateError(BeamTrainingError, RuntimeError):
    pass


class InsufficientBudgetError(InvalidArgumentError):
    """The training budget is smaller than the number of beams."""


class DegenerateProfileError(BeamTrainingError, ValueError):
    """The strongest beam is tied, so gaps vanish and exponents are undefined."""


class InsufficientDataError(BeamTrainingError, ValueError):
    pass
