"""Exception types raised by dpmix."""


class DpmixError(Exception):
    """Base class for all package errors."""


class InvalidPartitionError(DpmixError, ValueError):
    """A block partition is malformed or contains a zero-weight block."""


class InfeasibleError(DpmixError, ValueError):
    """No partition with the requested number of blocks exists."""


class DivergenceError(DpmixError, ArithmeticError):
    """EM produced a non-finite log-likelihood.

    The last parameters with a finite likelihood are kept on ``last_params``.
    """

    def __init__(self, message, last_params=None, iteration=None):
        super().__init__(message)
        self.last_params = last_params
        self.iteration = iteration


class FormatError(DpmixError, ValueError):
    """Input file does not follow the expected layout."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.line = line
        self.column = column
