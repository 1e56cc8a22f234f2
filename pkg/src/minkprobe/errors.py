"""Domain errors raised by the geometry, measure and solver layers."""


class MinkprobeError(Exception):
    """Base class; the CLI reports ``type(err).__name__`` verbatim."""


class Unbounded(MinkprobeError):
    pass


class Empty(MinkprobeError):
    pass


class EmptyInput(MinkprobeError):
    pass


class EmptyMeasure(MinkprobeError):
    pass


class NotProbability(MinkprobeError):
    pass


class NotZeroMean(MinkprobeError):
    pass


class DegenerateSupport(MinkprobeError):
    pass


class MaxIterations(MinkprobeError):
    pass


class DimensionMismatch(MinkprobeError):
    pass


class InsufficientTrials(MinkprobeError):
    pass


class MalformedCSV(MinkprobeError):
    pass
