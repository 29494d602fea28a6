"""Exception types shared across the toolkit."""


class RandimError(Exception):
    """Base class for all toolkit errors."""


class BadGeometry(RandimError):
    """Branch intervals overlap, escape [0,1], or violate the partition layout."""


class NonDifferentiable(RandimError):
    """Derivative-based quantity requested at a point where f' vanishes."""


class SingularWeight(RandimError):
    """A transfer-operator weight |T'|^{-t} could not be evaluated (|T'| < 1e-300).

    Signals that the truncation level or the bin resolution must increase.
    """


class NoConvergence(RandimError):
    """Pullback iteration did not reach the requested total-variation tolerance."""

    def __init__(self, message, residual=None, t=None, sample_index=None):
        super().__init__(message)
        self.residual = residual
        self.t = t
        self.sample_index = sample_index


class NoRoot(RandimError):
    """Pressure stays positive at t = 1 although the branch domains leave gaps."""


class Explosion(RandimError):
    """Cylinder tree exceeded the configured leaf cap."""


class DegenerateFit(RandimError):
    """Too few usable box-counting scales for a least-squares fit."""


class OutOfGrid(RandimError):
    """Requested parameter is not bracketed by the computed pressure grid."""


class ConfigError(RandimError):
    """Experiment configuration failed validation; names the offending key."""

    def __init__(self, key, message):
        super().__init__(f"config key '{key}': {message}")
        self.key = key
