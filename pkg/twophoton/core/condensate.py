"""
:mod:`twophoton.core.condensate` -- Driven-dissipative condensate with a reservoir
=================================================================================

The condensate ``a`` decays at ``gamma_a``; the reservoir ``b`` decays at
``gamma_b``, is pumped incoherently at ``P_b`` and feeds the condensate
through ``a^+ b`` at ``P_ba``. Every process maps Fock states to Fock
states, so the normally-ordered moments

    N[n, m] = <a^+n a^n b^+m b^m>

obey a closed recurrence (:func:`moment_rhs`), except that the transfer
term reaches one order up. :func:`steady_moments` truncates at a total
order, replaces the moments just above it by their factorized values
``N[1,0]**n N[0,1]**m``, and raises the order until the low moments no
longer change.

The same model as a Lindblad master equation (:func:`condensate_model`)
gives the filtered two-photon spectrum through the sensor engine.
"""

from collections import namedtuple

import numpy as np
from scipy import sparse, optimize
from scipy.sparse import linalg as sparse_linalg
from scipy.integrate import solve_ivp

from ..util.logger_setup import getLogger
from .common import (ConfigError, NumericalError, IntegrationError, TruncationError,
                     UndefinedCorrelationError)
from .fock import FockSpace, LindbladModel
from .analytic import FilterParams
from . import lindblad
from . import sensors

logger = getLogger(__name__)

DEFAULT_ORDER = 8
MAX_ORDER = 80
MOMENT_TOLERANCE = 1e-6
DEFAULT_GAMMA = 0.5
DEFAULT_AXIS = np.linspace(-3.0, 3.0, 41)
DEFAULT_GAMMA_LADDER = (0.5, 0.75, 1.0, 5.0)


class CondensateParams(namedtuple('CondensateParams', 'gamma_a gamma_b P_b P_ba')):
    __slots__ = ()

    def __new__(cls, gamma_a=1.0, gamma_b=1.0, P_b=1.0, P_ba=10.0):
        values = [float(x) for x in (gamma_a, gamma_b, P_b, P_ba)]
        for name, x in zip(cls._fields, values):
            if not (x >= 0 and np.isfinite(x)):
                raise ConfigError('%s must be a non-negative number, got %r' % (name, x))
        gamma_a, gamma_b, P_b, P_ba = values
        if not gamma_b - P_b + P_ba > 0:
            raise ConfigError('reservoir is unstable: gamma_b - P_b + P_ba = %r <= 0'
                              % (gamma_b - P_b + P_ba))
        return super(CondensateParams, cls).__new__(cls, gamma_a, gamma_b, P_b, P_ba)


class MomentTable(object):
    """
    ``N[n, m]`` for ``n + m <= order``; ``N[0, 0] = 1``

    >>> t = MomentTable(2, {(1, 0): 1.0, (2, 0): 1.5})
    >>> t[0, 0], t[1, 1], t.g2_zero()
    (1.0, 0.0, 1.5)
    """

    def __init__(self, order, values=None):
        self.order = int(order)
        self.values = dict(((n, m), 0.0) for n, m in _entries(self.order, include_zero=True))
        self.values[0, 0] = 1.0
        for key, value in (values or {}).items():
            if key in self.values and key != (0, 0):
                self.values[key] = float(value)

    def __getitem__(self, key):
        return self.values[key]

    def __contains__(self, key):
        return key in self.values

    def get(self, key):
        """Entry `key`, with the factorized value beyond the table"""
        if key in self.values:
            return self.values[key]
        n, m = key
        return self.values[1, 0] ** n * self.values[0, 1] ** m

    def g2_zero(self):
        mean = self.values[1, 0]
        if mean <= 1e-14:
            raise UndefinedCorrelationError('condensate is empty')
        return self.values[2, 0] / mean ** 2

    def to_tree(self):
        return [{'n': n, 'm': m, 'value': v} for (n, m), v in sorted(self.values.items())]


def _entries(order, include_zero=False):
    start = 0 if include_zero else 1
    return [(n, total - n) for total in range(start, order + 1) for n in range(total, -1, -1)]


def _recurrence(n, m, p):
    """Coefficients ``[(coeff, (n', m'))]`` of ``dN[n,m]/dt``"""
    terms = [(-(n * p.gamma_a + m * (p.gamma_b - p.P_b + p.P_ba) + n * m * p.P_ba), (n, m))]
    if n >= 1:
        terms.append((n * n * p.P_ba, (n - 1, m + 1)))
        terms.append((n * p.P_ba, (n, m + 1)))
    if m >= 1:
        terms.append((p.P_b * m * m, (n, m - 1)))
        terms.append((-m * p.P_ba, (n + 1, m)))
    return [(c, key) for c, key in terms if c != 0]


def moment_rhs(table, p):
    """Time derivatives of every entry of `table` (factorized values above it)"""
    derivatives = {}
    for n, m in _entries(table.order):
        derivatives[n, m] = sum(c * table.get(key) for c, key in _recurrence(n, m, p))
    rhs = MomentTable(table.order, derivatives)
    rhs.values[0, 0] = 0.0
    return rhs


class _TruncatedHierarchy(object):
    """``A x + c + closure(x) = 0`` for the entries up to `order`"""

    def __init__(self, p, order):
        self.order = order
        self.keys = _entries(order)
        index = dict((key, i) for i, key in enumerate(self.keys))
        rows, cols, data = [], [], []
        self.constant = np.zeros(len(self.keys))
        self.upper = []
        for row, (n, m) in enumerate(self.keys):
            for c, key in _recurrence(n, m, p):
                if key == (0, 0):
                    self.constant[row] += c
                elif key in index:
                    rows.append(row)
                    cols.append(index[key])
                    data.append(c)
                else:
                    self.upper.append((row, c, key))
        self.matrix = sparse.csr_matrix((data, (rows, cols)), shape=(len(self.keys),) * 2)
        self.n10 = index[1, 0]
        self.n01 = index[0, 1]
        try:
            self.lu = sparse_linalg.splu(self.matrix.tocsc())
        except RuntimeError as e:
            raise NumericalError('moment hierarchy of order %d is singular: %s' % (order, e))

    def closure(self, n10, n01):
        b = np.zeros(len(self.keys))
        for row, c, (n, m) in self.upper:
            b[row] += c * n10 ** n * n01 ** m
        return b

    def solve(self, n10, n01):
        return self.lu.solve(-(self.constant + self.closure(n10, n01)))

    def fixed_point(self):
        def mismatch(guess):
            x = self.solve(*guess)
            return [x[self.n10] - guess[0], x[self.n01] - guess[1]]

        x0 = self.solve(0.0, 0.0)
        result = optimize.root(mismatch, [x0[self.n10], x0[self.n01]], method='hybr',
                               options={'xtol': 1e-14})
        if not result.success:
            # hybr also flags stalls at the xtol floor; the residual decides
            logger.debug('moment closure at order %d: %s', self.order, result.message)
        x = self.solve(*result.x)
        residual = np.max(np.abs(self.rhs(x)))
        scale = max(1.0, np.max(np.abs(x)))
        if not residual <= 1e-10 * scale:
            raise NumericalError('moment closure did not converge at order %d: residual %.3g (%s)'
                                 % (self.order, residual, result.message))
        return MomentTable(self.order, dict(zip(self.keys, x)))

    def rhs(self, x):
        return self.matrix @ x + self.constant + self.closure(x[self.n10], x[self.n01])


def _close(a, b, tolerance):
    return abs(a - b) <= tolerance * max(abs(a), abs(b), 1e-300)


def steady_moments(p, order=DEFAULT_ORDER, tolerance=MOMENT_TOLERANCE, max_order=MAX_ORDER):
    """Stationary moments, with the order raised by 2 until N[1,0], N[0,1],
    N[2,0] and N[1,1] agree within `tolerance`"""
    if order < 2:
        raise ConfigError('moment order must be at least 2, got %r' % order)
    watched = [(1, 0), (0, 1), (2, 0), (1, 1)]
    previous = None
    current = _TruncatedHierarchy(p, order).fixed_point()
    while order + 2 <= max_order:
        order += 2
        previous, current = current, _TruncatedHierarchy(p, order).fixed_point()
        logger.debug('moments at order %d: %s', order,
                     ', '.join('N%d%d=%r' % (n, m, current[n, m]) for n, m in watched))
        if all(_close(previous[key], current[key], tolerance) for key in watched):
            return current
    raise TruncationError('moment hierarchy did not converge up to order %d' % max_order,
                          previous, current)


def moments_from_state(rho, order, modes=('a', 'b')):
    """Factorial moments of a density matrix on a two-mode space"""
    space = rho.space
    occ = space.occupations()
    na = occ[:, space.index(modes[0])].astype(float)
    nb = occ[:, space.index(modes[1])].astype(float)
    pops = rho.populations()
    values = {}
    for n, m in _entries(order):
        fa = np.prod([na - k for k in range(n)], axis=0) if n else 1.0
        fb = np.prod([nb - k for k in range(m)], axis=0) if m else 1.0
        values[n, m] = float(np.sum(pops * fa * fb))
    return MomentTable(order, values)


def moment_trajectory(p, initial, times, order=None):
    """Integrate the closed hierarchy from `initial` (a :class:`MomentTable`)"""
    order = initial.order if order is None else order
    hierarchy = _TruncatedHierarchy(p, order)
    x0 = np.array([initial.values.get(key, 0.0) for key in hierarchy.keys])
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or np.any(np.diff(times) < 0) or times[0] < 0 \
            or times[-1] <= 0:
        raise ConfigError('times must be non-negative, sorted and not all zero')
    solution = solve_ivp(lambda t, x: hierarchy.rhs(x), (0.0, times[-1]), x0,
                         method='LSODA', t_eval=times, rtol=1e-10, atol=1e-12)
    if not solution.success:
        raise IntegrationError('moment integration failed: %s' % solution.message)
    return [MomentTable(order, dict(zip(hierarchy.keys, column))) for column in solution.y.T]


def condensate_model(p, truncation):
    """The condensate as a :class:`LindbladModel`; `truncation` maps 'a', 'b' to cutoffs"""
    space = FockSpace(['a', 'b'], truncation)
    return LindbladModel(space, collapse_terms=[('a', p.gamma_a), ('b', p.gamma_b),
                                                ('bd', p.P_b), ('ad*b', p.P_ba)])


def steady_state_oracle(p, truncation=None, tolerance=lindblad.TRUNCATION_TOLERANCE):
    """``(model, rho_ss)`` at a truncation grown until the top levels are empty"""
    start = {'a': 8, 'b': 3} if truncation is None else dict(truncation)
    return lindblad.auto_truncate(lambda t: condensate_model(p, t), start, tolerance)


Probe = namedtuple('Probe', 'region omega1 omega2')


def region_probes(model, rho_ss):
    """Diagonal, axis and antidiagonal probe points at the half width of the line"""
    omega = lindblad.line_halfwidth(model, rho_ss, 'a')
    return [Probe(1, omega, omega), Probe(2, omega, 0.0), Probe(3, -omega, omega)]


def condensate_2ps(p, Gamma=DEFAULT_GAMMA, axis1=DEFAULT_AXIS, axis2=DEFAULT_AXIS,
                   threads=1, epsilon=None, model=None, tolerance=lindblad.TRUNCATION_TOLERANCE):
    """Stationary two-photon spectrum of the condensate emission"""
    if model is None:
        model, rho = steady_state_oracle(p, tolerance=tolerance)
    f = FilterParams(axis1[0], axis2[0], Gamma)
    grid = sensors.steady_grid(model, 'a', f, axis1, axis2, threads, epsilon)
    grid.metadata.update({'model_id': model.model_id(),
                          'truncation': list(model.space.truncation)})
    return grid


def region_traces(p, taus, Gamma=DEFAULT_GAMMA, epsilon=None, model=None,
                  tolerance=lindblad.TRUNCATION_TOLERANCE):
    """``g2(tau)`` at the three probe points, as ``[(Probe, CorrelationTrace)]``"""
    if model is None:
        model, rho = steady_state_oracle(p, tolerance=tolerance)
    else:
        rho = lindblad.steady_state(model)
    traces = []
    for probe in region_probes(model, rho):
        f = FilterParams(probe.omega1, probe.omega2, Gamma)
        values = sensors.filtered_g2_tau(model, 'a', f, taus, epsilon)
        trace = sensors.CorrelationTrace(taus, values, metadata={
            'region': probe.region, 'omega1': probe.omega1, 'omega2': probe.omega2,
            'Gamma': Gamma, 'model_id': model.model_id()})
        traces.append((probe, trace))
    return traces


def gamma_ladder(p, gammas=DEFAULT_GAMMA_LADDER, epsilon=None, model=None,
                 tolerance=lindblad.TRUNCATION_TOLERANCE):
    """Antidiagonal-probe ``g2`` for each filter width in `gammas`"""
    if model is None:
        model, rho = steady_state_oracle(p, tolerance=tolerance)
    else:
        rho = lindblad.steady_state(model)
    probe = region_probes(model, rho)[2]
    return [(Gamma, sensors.steady_2ps(model, 'a', FilterParams(probe.omega1, probe.omega2, Gamma),
                                       epsilon))
            for Gamma in gammas]
