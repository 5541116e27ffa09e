"""Exception types raised by propaxis."""


class PropaxisError(ValueError):
    """Base class for all domain errors raised by this package."""


class EmbeddingFormatError(PropaxisError):
    """An embedding file could not be read or is malformed."""


class SeedError(PropaxisError):
    """A seed list is invalid or cannot produce an axis."""


class AxisError(PropaxisError):
    """An axis is degenerate or incompatible with the vectors it is used on."""


class FitError(PropaxisError):
    """Axis fitting cannot proceed on the given data."""


class MetricError(PropaxisError):
    """A metric is undefined for its inputs."""


class RegressionError(PropaxisError):
    """Least-squares regression is ill-posed for its inputs."""
