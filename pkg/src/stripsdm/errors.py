"""Exception hierarchy shared by the solver modules."""


class StripError(Exception):
    """Base class for all solver errors."""


class DegenerateSpectralPoint(StripError):
    """Raised when k_t or k_z falls below the configured floor."""


class QuadratureError(StripError):
    """Adaptive integration did not reach tolerance.

    ``estimate`` and ``error`` carry the best result found so far.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SingularSystemError(StripError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ContourError(StripError):
    pass


class PoleProximityError(StripError):
    pass


class ConfigError(StripError):
    pass
