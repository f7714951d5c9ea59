"""Exception hierarchy shared by the library and the CLI."""


class ArffError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(ArffError, ValueError):
    pass


class SingularMatrixError(ArffError):
    pass


class DegeneratePMFError(ArffError):
    """Resampling weights are all zero."""


class NonPositiveDefiniteError(ArffError):
    """A covariance matrix failed its Cholesky factorization."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class TrainingDivergedError(ArffError):
    pass


class SimulationError(ArffError):
    def __init__(self, message, path=None, step=None):
        super().__init__(message)
        self.path = path
        self.step = step


class ConfigError(ArffError):
    """Malformed experiment configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
