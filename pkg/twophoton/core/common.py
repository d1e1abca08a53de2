"""
Exceptions and physical constants shared by the numerical modules.

Configuration problems derive from :class:`ConfigError` (also a
``ValueError``), numerical failures from :class:`NumericalError`, and a
photon record that is too sparse to estimate from raises
:class:`InsufficientStatisticsError`. The command line maps these
three families to distinct exit codes.
"""

#: reduced Planck constant in micro-electronvolt picoseconds
HBAR_UEV_PS = 658.2119569

json_formatting_options = dict(indent=2, separators=(', ', ' : '),
                               sort_keys=True, allow_nan=False)


class TwoPhotonError(Exception):
    pass


class ConfigError(TwoPhotonError, ValueError):
    pass


class ModelError(ConfigError):
    """A model, state or operator string is malformed"""


class CapacityError(ConfigError):
    def __init__(self, msg, dimension, limit):
        ConfigError.__init__(self, msg)
        self.dimension = dimension
        self.limit = limit


class ResolutionError(ConfigError):
    def __init__(self, msg, step, rate):
        ConfigError.__init__(self, msg)
        self.step = step
        self.rate = rate


class NumericalError(TwoPhotonError):
    pass


class IntegrationError(NumericalError):
    def __init__(self, msg, achieved_tolerance=None):
        NumericalError.__init__(self, msg)
        self.achieved_tolerance = achieved_tolerance


class NonUniqueSteadyStateError(NumericalError):
    pass


class SingularResolventError(NumericalError):
    def __init__(self, msg, shift=None, lam=None):
        NumericalError.__init__(self, msg)
        self.shift = shift
        self.lam = lam


class ExtrapolationError(NumericalError):
    def __init__(self, msg, lambdas, values):
        NumericalError.__init__(self, msg)
        self.lambdas = list(lambdas)
        self.values = list(values)


class MomentClosureError(NumericalError):
    def __init__(self, msg, monomial):
        NumericalError.__init__(self, msg)
        self.monomial = monomial


class TruncationError(NumericalError):
    def __init__(self, msg, previous=None, current=None):
        NumericalError.__init__(self, msg)
        self.previous = previous
        self.current = current


class LeadingOrderError(NumericalError):
    def __init__(self, msg, values=None):
        NumericalError.__init__(self, msg)
        self.values = values


class FormFactorSingularityError(NumericalError):
    def __init__(self, msg, factor):
        NumericalError.__init__(self, msg)
        self.factor = factor


class UndefinedCorrelationError(NumericalError):
    pass


class InsufficientStatisticsError(TwoPhotonError):
    def __init__(self, msg, counts):
        TwoPhotonError.__init__(self, msg)
        self.counts = counts
