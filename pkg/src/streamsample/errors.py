"""Exception hierarchy shared by the samplers and the harness."""


class SamplingError(ValueError):
    """Base class for every error raised by this package."""


class InvalidRange(SamplingError):
    pass


class InvalidProbability(SamplingError):
    pass


class InvalidArgument(SamplingError):
    pass


class InvalidQuery(SamplingError):
    pass


class CorruptInput(SamplingError):
    pass


class MissingSlot(SamplingError):
    pass


class EmptyStream(SamplingError):
    pass


class ParseError(SamplingError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownSuite(SamplingError):
    pass
