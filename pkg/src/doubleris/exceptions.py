"""Exception types raised across the package.

All of them derive from :class:`ValueError` so callers that only care about
"bad input" can catch that.
"""


class DoubleRisError(ValueError):
    """Base class for every error raised by :mod:`doubleris`."""


class NotHermitian(DoubleRisError):
    pass


class IndefiniteMatrix(DoubleRisError):
    pass


class DimensionMismatch(DoubleRisError):
    pass


class InvalidCorrelation(DoubleRisError):
    pass


class InvalidGeometry(DoubleRisError):
    pass


class InvalidKappa(DoubleRisError):
    pass


class InvalidDistance(DoubleRisError):
    pass


class CoincidentNodes(InvalidDistance):
    pass


class InvalidCf(DoubleRisError):
    pass


class DegenerateEta(DoubleRisError):
    pass


class SingularCovariance(DoubleRisError):
    pass


class SchemaError(DoubleRisError):
    """Scenario file does not match the expected structure.

    ``path`` holds the dotted location of the offending field.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class RangeError(DoubleRisError):
    """Scenario value lies outside its admissible domain."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
