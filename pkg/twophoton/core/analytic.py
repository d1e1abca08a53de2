"""
:mod:`twophoton.core.analytic` -- Closed forms for a decaying, dephasing mode
=============================================================================

A single bosonic mode that only decays (rate ``gamma_a``) and dephases
(rate ``gamma_phi``) can be solved exactly: :func:`rho_spontaneous`
gives its density matrix at any time and the functions below give the
time-integrated filtered spectrum and two-photon correlations of its
emission. Their ratio factorizes as ``g2_0 * F`` where ``F`` is the
boson form factor, which depends on the filters and the rates only::

    >>> f = FilterParams(omega1=0.5, omega2=-0.5, Gamma=0.5)
    >>> round(boson_form_factor(f, DecayDephaseParams(gamma_phi=0.0)), 12)
    1.0

All rates and frequencies are in units of ``gamma_a``; frequencies are
detunings from the mode.
"""

from collections import namedtuple

import numpy as np
from scipy.special import comb

from ..util.logger_setup import getLogger
from .common import ConfigError, ModelError, FormFactorSingularityError, \
    UndefinedCorrelationError
from .fock import FockSpace, LindbladModel, DensityMatrix

logger = getLogger(__name__)

SINGULARITY_THRESHOLD = 1e-12
DEFAULT_EPSILON = 2e-3


def _require(condition, msg):
    if not condition:
        raise ConfigError(msg)


def _equal_widths(f):
    """The closed forms take one filter width; unequal widths go through the sensor chain"""
    g1, g2 = f.widths()
    _require(g1 == g2, 'closed forms need equal filter widths, got %r and %r' % (g1, g2))
    return g1


class DecayDephaseParams(namedtuple('DecayDephaseParams', 'gamma_a gamma_phi')):
    __slots__ = ()

    def __new__(cls, gamma_a=1.0, gamma_phi=0.0):
        gamma_a, gamma_phi = float(gamma_a), float(gamma_phi)
        _require(gamma_a > 0 and np.isfinite(gamma_a), 'gamma_a must be positive, got %r' % gamma_a)
        _require(gamma_phi >= 0 and np.isfinite(gamma_phi),
                 'gamma_phi must be non-negative, got %r' % gamma_phi)
        return super(DecayDephaseParams, cls).__new__(cls, gamma_a, gamma_phi)


class FilterParams(namedtuple('FilterParams', 'omega1 omega2 Gamma epsilon Gamma_2')):
    """
    Two Lorentzian filters at detunings `omega1`, `omega2`

    `Gamma` is the width of the first filter and of the second unless
    `Gamma_2` is given. `epsilon` is the sensor coupling, which only
    appears in unnormalized quantities.
    """
    __slots__ = ()

    def __new__(cls, omega1, omega2, Gamma, epsilon=DEFAULT_EPSILON, Gamma_2=None):
        omega1, omega2, Gamma, epsilon = float(omega1), float(omega2), float(Gamma), float(epsilon)
        _require(np.isfinite(omega1) and np.isfinite(omega2), 'filter frequencies must be finite')
        _require(Gamma > 0 and np.isfinite(Gamma), 'filter width must be positive, got %r' % Gamma)
        _require(epsilon > 0, 'sensor coupling must be positive, got %r' % epsilon)
        if Gamma_2 is not None:
            Gamma_2 = float(Gamma_2)
            _require(Gamma_2 > 0 and np.isfinite(Gamma_2),
                     'second filter width must be positive, got %r' % Gamma_2)
        return super(FilterParams, cls).__new__(cls, omega1, omega2, Gamma, epsilon, Gamma_2)

    def widths(self):
        return self.Gamma, self.Gamma if self.Gamma_2 is None else self.Gamma_2

    def swapped(self):
        g1, g2 = self.widths()
        return FilterParams(self.omega2, self.omega1, g2, self.epsilon,
                            None if self.Gamma_2 is None else g1)

    def at(self, omega1, omega2):
        return self._replace(omega1=float(omega1), omega2=float(omega2))


class CompositeRate(namedtuple('CompositeRate', 'gamma')):
    """``gamma = Gamma + gamma_a + gamma_phi``, the width of the filtered line"""
    __slots__ = ()

    @classmethod
    def of(cls, f, p):
        return cls(f.Gamma + p.gamma_a + p.gamma_phi)


def decay_dephasing_model(p, truncation=2, mode='a'):
    """The Lindblad model of a mode with decay and pure dephasing"""
    return LindbladModel(FockSpace([mode], [truncation]),
                         collapse_terms=[(mode, p.gamma_a), (mode + 'd*' + mode, p.gamma_phi)])


def rho_spontaneous(rho0, params, t):
    """Density matrix at time `t` of a decaying and dephasing mode

    Each coherence ``rho[n, m]`` is fed from ``rho0[n+j, m+j]`` with
    binomial weights; the sum over ``j`` is exact on the truncated
    space, since decay never raises the occupation.
    """
    if len(rho0.space.modes) != 1:
        raise ModelError('rho_spontaneous needs a single-mode state, got %r' % (rho0.space,))
    if not t >= 0:
        raise ConfigError('time must be non-negative, got %r' % t)
    src = rho0.entries
    size = src.shape[0]
    n = np.arange(size)
    decay = np.exp(-params.gamma_a * t)
    loss = -np.expm1(-params.gamma_a * t)
    out = np.zeros_like(src)
    last = 0.0
    for j in range(size):
        k = size - j
        c = np.sqrt(comb(n[:k] + j, j))
        term = src[j:, j:] * np.outer(c, c) * loss ** j
        out[:k, :k] += term
        if np.any(term):
            last = np.max(np.abs(term))
    logger.debug('rho_spontaneous at t=%r: last retained term %.3g', t, last)
    envelope = decay ** ((n[:, None] + n[None, :]) / 2.0)
    dephasing = np.exp(-0.5 * params.gamma_phi * (n[:, None] - n[None, :]) ** 2 * t)
    return DensityMatrix(rho0.space, out * envelope * dephasing)


def _check(denominator, name):
    if np.min(np.abs(denominator)) < SINGULARITY_THRESHOLD:
        raise FormFactorSingularityError('form factor denominator %s vanishes' % name, name)
    return denominator


def _ordered_term(w1, w2, Gamma, p):
    """The term written for one ordering of the two filters; the
    exchanged term is the same expression with ``w1``, ``w2`` swapped"""
    ga = p.gamma_a
    g = Gamma + ga + p.gamma_phi
    s = g + 2 * ga
    bracket = (s / _check(s ** 2 + 4 * w1 ** 2, '(gamma+2gamma_a)^2+4omega1^2')
               + ga / _check(s + 2j * w2, 'gamma+2gamma_a+2i omega2')
               * ((s - 1j * (w1 - w2))
                  / (_check(s - 2j * w1, 'gamma+2gamma_a-2i omega1')
                     * _check(Gamma + ga - 1j * (w1 - w2), 'Gamma+gamma_a-i(omega1-omega2)'))
                  + (s + 1j * (w1 + w2))
                  / (_check(s + 2j * w1, 'gamma+2gamma_a+2i omega1')
                     * _check(2 * g - Gamma - ga + 1j * (w1 + w2),
                              '2gamma-Gamma-gamma_a+i(omega1+omega2)'))))
    return bracket / _check(g + 2j * w2, 'gamma+2i omega2'), g


def _form_factor(w1, w2, Gamma, p):
    total = 0.0
    for a, b in ((w1, w2), (w2, w1)):
        term, g = _ordered_term(a, b, Gamma, p)
        weight = (g ** 2 + 4 * a ** 2) * (g ** 2 + 4 * b ** 2) / (2 * g ** 2)
        total = total + np.real(weight * term)
    return total


def boson_form_factor(f, p):
    """Two-photon form factor ``F(omega1, omega2)`` of a decaying, dephasing mode

    Without dephasing ``F`` is 1 everywhere; with dephasing and narrow
    filters it approaches 2 on the diagonal.
    """
    return float(_form_factor(f.omega1, f.omega2, _equal_widths(f), p))


def form_factor_grid(f, p, axis1, axis2):
    """``F`` on the outer grid of `axis1` (rows, omega1) and `axis2` (columns)"""
    w1, w2 = np.meshgrid(np.asarray(axis1, dtype=float), np.asarray(axis2, dtype=float),
                         indexing='ij')
    return _form_factor(w1, w2, _equal_widths(f), p)


def integrated_filtered_intensity(f, p, n0, which=1):
    """Time-integrated population of sensor `which` (1 or 2) for an initial occupation `n0`"""
    _equal_widths(f)
    if n0 < 0:
        raise ConfigError('initial occupation must be non-negative, got %r' % n0)
    omega = f.omega1 if which == 1 else f.omega2
    g = CompositeRate.of(f, p).gamma
    return (f.epsilon ** 2 * 2 / (f.Gamma * p.gamma_a)
            * (g / 2) / ((g / 2) ** 2 + omega ** 2) * n0)


def integrated_filtered_correlations(f, p, n0, g2_0):
    """Time-integrated two-sensor correlation ``int int <n1(t) n2(t+tau)>``, both orderings"""
    _equal_widths(f)
    if n0 < 0:
        raise ConfigError('initial occupation must be non-negative, got %r' % n0)
    total = 0.0
    for w1, w2 in ((f.omega1, f.omega2), (f.omega2, f.omega1)):
        term, g = _ordered_term(w1, w2, f.Gamma, p)
        total += np.real(8 / (f.Gamma ** 2 * p.gamma_a ** 2) * term)
    return float(n0 ** 2 * g2_0 * f.epsilon ** 4 * total)


def filtered_g2(f, p, n0, g2_0):
    """Normalized integrated correlation; equals ``g2_0 * boson_form_factor(f, p)``"""
    i1 = integrated_filtered_intensity(f, p, n0, 1)
    i2 = integrated_filtered_intensity(f, p, n0, 2)
    if i1 == 0 or i2 == 0:
        raise UndefinedCorrelationError('no emission to correlate (n0=%r)' % n0)
    return integrated_filtered_correlations(f, p, n0, g2_0) / (i1 * i2)
