"""Exception hierarchy shared by all modules."""


class JitterDiscError(Exception):
    """Base class for errors raised by jitterdisc."""


class ParameterError(JitterDiscError, ValueError):
    """An argument violates a documented precondition."""


class ResourceLimitError(JitterDiscError, RuntimeError):
    """A computation would exceed a size or compute guard."""


class PointSetParseError(ParameterError):
    """A point-set file is malformed."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
