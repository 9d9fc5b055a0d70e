"""Exception types raised by warpbench."""


class WarpError(ValueError):
    """Base class for all validation errors raised by this package."""


class UnequalLengths(WarpError):
    pass


class InvalidSeries(WarpError):
    pass


class InvalidBand(WarpError):
    pass


class InvalidPath(WarpError):
    pass


class InvalidWindow(WarpError):
    pass


class NegativeInput(WarpError):
    pass


class TooShort(WarpError):
    pass


class EmptyCandidates(WarpError):
    pass


class EmptyFile(WarpError):
    pass


class ParseError(WarpError):
    """Malformed record in a UCR-format file; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
