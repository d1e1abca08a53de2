"""
:mod:`twophoton.core.sensors` -- Frequency-filtered correlations via sensors
============================================================================

A filter at frequency ``omega`` with width ``Gamma`` is modelled as a
two-level *sensor* coupled to the emitter with strength ``epsilon``;
to leading order in ``epsilon`` the sensor populations and their
correlations are the filtered intensities and two-photon correlations.
Two routes are implemented.

Spontaneous emission (the emitter starts in some state and decays)
uses a recursive chain of resolvents on the moment vector of the
emitter. The time integrals are regularized with ``exp(-lambda t)``;
:func:`spontaneous_2ps` evaluates the chain on a ladder of lambdas and
Richardson-extrapolates to ``lambda -> 0``. The moment vectors of the
chain are indexed by the sensor powers ``(mu1, nu1, mu2, nu2)`` of
``<s1^+mu1 s2^+mu2 O s2^nu2 s1^nu1>`` for each normal-ordered emitter
monomial ``O``.

Stationary emission uses the literal construction: the model is
extended with two sensor modes (:func:`with_sensors`), its steady
state is solved, and the normalized sensor cross-correlation is read
off (:func:`steady_2ps`), or propagated with the regression theorem
(:func:`filtered_g2_tau`).
"""

from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import linalg

from ..util.logger_setup import getLogger
from .common import (ConfigError, ModelError, NumericalError, MomentClosureError,
                     SingularResolventError, ExtrapolationError, LeadingOrderError,
                     UndefinedCorrelationError)
from .operators import Monomial, Polynomial, normal_order, normal_key_str
from .fock import DensityMatrix
from . import lindblad

logger = getLogger(__name__)

LAMBDA_START = 1e-2
LAMBDA_LEVELS = 6
RICHARDSON_TOLERANCE = 1e-7
RESOLVENT_TOLERANCE = 1e-12
SENSOR_POPULATION_LIMIT = 1e-4
LINEARITY_TOLERANCE = 1e-3
SENSOR_MODES = ('s1', 's2')


def lambda_ladder(start=LAMBDA_START, levels=LAMBDA_LEVELS):
    """Regularization rates ``start / 2**k``

    >>> lambda_ladder(1e-2, 3)
    [0.01, 0.005, 0.0025]
    """
    return [start / 2 ** k for k in range(levels)]


class MomentBasis(object):
    """Ordered normal keys of one mode, starting with the identity"""

    def __init__(self, operators):
        self.operators = tuple(operators)
        self.index = dict((op, i) for i, op in enumerate(self.operators))
        assert self.operators[0] == ()

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __contains__(self, key):
        return key in self.index

    def labels(self):
        return [normal_key_str(op) for op in self.operators]


def _key(mode, p, q):
    return ((mode, p, q),) if (p, q) != (0, 0) else ()


def moment_basis(mode, max_order=2):
    """All ``a^+p a^q`` with ``p, q <= max_order``, by degree

    >>> moment_basis('a', 2).labels()
    ['1', 'a', 'ad', 'ad*a', 'a*a', 'ad*ad', 'ad*a*a', 'ad*ad*a', 'ad*ad*a*a']
    """
    powers = [(p, q) for p in range(max_order + 1) for q in range(max_order + 1)]
    powers.sort(key=lambda pq: (pq[0] + pq[1], abs(pq[0] - pq[1]), pq[0]))
    return MomentBasis(_key(mode, p, q) for p, q in powers)


def adjoint_generator(model, key):
    """``i[H, X] + sum rate/2 (2 O^+ X O - O^+ O X - X O^+ O)`` as a :class:`Polynomial`"""
    x = Polynomial({key: 1})
    h = Polynomial()
    for op, coeff in model.hamiltonian_terms:
        p = normal_order(op)
        h = h + (coeff * p if op.is_hermitian() else coeff * (p + p.adjoint()))
    result = 1j * h.commutator(x)
    for op, rate in model.collapse_terms:
        if rate == 0:
            continue
        o = normal_order(op)
        od = o.adjoint()
        odo = od * o
        result = result + 0.5 * rate * (2 * (od * x * o) - odo * x - x * odo)
    return result


class MomentSystem(object):
    """
    ``d v/dt = M v`` for the moments ``v = <O>``, plus the ladder matrices
    ``(Tplus w)[O] = w[a^+ O]`` and ``(Tminus w)[O] = w[O a]``

    Ladder entries that leave the basis are dropped; the chain only
    needs them on components that stay inside it.
    """

    def __init__(self, basis, M, Tplus, Tminus, mode, v0=None):
        self.basis = basis
        self.M = M
        self.Tplus = Tplus
        self.Tminus = Tminus
        self.mode = mode
        self.v0 = v0

    def with_initial_state(self, rho):
        """The same system with ``v0 = Tr(rho O)`` for every basis element"""
        v0 = np.array([lindblad.expectation(rho, Monomial.from_normal_key(op))
                       for op in self.basis])
        return MomentSystem(self.basis, self.M, self.Tplus, self.Tminus, self.mode, v0)

    def has_stationary_source(self):
        return bool(np.any(self.M[1:, 0]))


def build_moment_system(model, mode, max_order=2, rho0=None):
    basis = moment_basis(mode, max_order)
    n = len(basis)
    M = np.zeros((n, n), dtype=complex)
    for row, key in enumerate(basis):
        for out, coeff in adjoint_generator(model, key).items():
            if out not in basis:
                raise MomentClosureError('equation of motion of %s involves %s outside the basis'
                                         % (normal_key_str(key), normal_key_str(out)),
                                         normal_key_str(out))
            M[row, basis.index[out]] += coeff
    Tplus = np.zeros((n, n))
    Tminus = np.zeros((n, n))
    for row, key in enumerate(basis):
        p, q = (key[0][1], key[0][2]) if key else (0, 0)
        up = basis.index.get(_key(mode, p + 1, q))
        if up is not None:
            Tplus[row, up] = 1
        down = basis.index.get(_key(mode, p, q + 1))
        if down is not None:
            Tminus[row, down] = 1
    logger.debug('moment system for mode %s: %d operators, M diagonal: %s',
                 mode, n, not np.any(M - np.diag(np.diag(M))))
    system = MomentSystem(basis, M, Tplus, Tminus, mode)
    if rho0 is not None:
        system = system.with_initial_state(rho0)
    return system


def resolvent_apply(M, shift, lam, x):
    """``-(M + (shift - lam) I)^-1 x``"""
    A = M + (shift - lam) * np.eye(M.shape[0])
    try:
        y = -linalg.solve(A, x)
    except linalg.LinAlgError as e:
        raise SingularResolventError('resolvent is singular at shift %r: %s' % (shift, e),
                                     shift, lam)
    residual = np.max(np.abs(A @ y + x)) if len(x) else 0.0
    bound = RESOLVENT_TOLERANCE * (np.max(np.abs(A).sum(axis=1)) * np.max(np.abs(y))
                                   + np.max(np.abs(x)))
    if not np.all(np.isfinite(y)) or residual > bound:
        raise SingularResolventError('resolvent residual %.3g at shift %r' % (residual, shift),
                                     shift, lam)
    return y


IntegratedCorrelations = namedtuple('IntegratedCorrelations',
                                    'numerator intensity1 intensity2 g2')


class _Chain(object):
    """The resolvent chain at one regularization rate"""

    def __init__(self, system, f, lam):
        self.system = system
        self.eps = f.epsilon
        self.omegas = (f.omega1, f.omega2)
        self.widths = f.widths()
        self.lam = lam
        self.single = {}

    def shift(self, s):
        c = 0j
        for i in range(2):
            mu, nu = s[2 * i], s[2 * i + 1]
            c += (mu - nu) * 1j * self.omegas[i] - (mu + nu) * self.widths[i] / 2
        return c

    def sources(self, s, sensor, lookup):
        """Feeding terms from lowering the powers of `sensor` in `s`"""
        sysm = self.system
        src = 0
        mu, nu = s[2 * sensor], s[2 * sensor + 1]
        if mu:
            lower = list(s)
            lower[2 * sensor] = 0
            src = src + mu * 1j * self.eps * (sysm.Tplus @ lookup(tuple(lower)))
        if nu:
            lower = list(s)
            lower[2 * sensor + 1] = 0
            src = src - nu * 1j * self.eps * (sysm.Tminus @ lookup(tuple(lower)))
        return src

    def wbar(self, s):
        try:
            return self.single[s]
        except KeyError:
            pass
        sysm = self.system
        if s == (0, 0, 0, 0):
            value = resolvent_apply(sysm.M, 0, self.lam, sysm.v0)
        else:
            src = np.zeros(len(sysm.basis), dtype=complex)
            src = src + self.sources(s, 0, self.wbar) + self.sources(s, 1, self.wbar)
            value = resolvent_apply(sysm.M, self.shift(s), self.lam, src)
        self.single[s] = value
        return value

    def two_time(self, first):
        """``int int <n_first(t) n_other(t + tau)>``, regularized in t and tau"""
        other = 1 - first
        memo = {}

        def W(s):
            if s in memo:
                return memo[s]
            src = self.wbar(s) + self.sources(s, other, W)
            # the first sensor is frozen at the earlier time
            frozen = list(s)
            frozen[2 * first] = frozen[2 * first + 1] = 0
            value = resolvent_apply(self.system.M, self.shift(frozen), self.lam, src)
            memo[s] = value
            return value

        s = [0, 0, 0, 0]
        s[2 * first] = s[2 * first + 1] = 1
        s[2 * other] = s[2 * other + 1] = 1
        return W(tuple(s))[0].real

    def evaluate(self):
        numerator = self.two_time(0) + self.two_time(1)
        return numerator, self.wbar((1, 1, 0, 0))[0].real, self.wbar((0, 0, 1, 1))[0].real


def richardson(values, ratio=2.0):
    """Richardson table for values at rates ``lam0 / ratio**k``, error ``O(lam)``

    Returns the list of rows; ``table[k][k]`` is the best estimate
    using the first ``k + 1`` rates.

    >>> table = richardson([1 + 0.1, 1 + 0.05, 1 + 0.025])
    >>> round(table[-1][-1], 14)
    1.0
    """
    table = []
    for k, v in enumerate(values):
        row = [v]
        for j in range(1, k + 1):
            factor = ratio ** j
            row.append(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / (factor - 1))
        table.append(row)
    return table


def _extrapolate(name, lambdas, values, tolerance, atol=0.0):
    table = richardson(values)
    diagonal = [row[-1] for row in table]
    best = diagonal[-1]
    change = abs(diagonal[-1] - diagonal[-2]) if len(diagonal) > 1 else 0.0
    logger.debug('%s: lambda ladder %r, values %r, extrapolants %r', name, lambdas, values, diagonal)
    steps = np.abs(np.diff(diagonal))
    if len(steps) > 2 and np.any(np.diff(steps[1:]) > 0) and change > 0:
        logger.warning('%s: lambda extrapolants do not converge monotonically: %r',
                       name, diagonal)
    if change > tolerance * abs(best) + atol:
        raise ExtrapolationError('%s did not converge as lambda -> 0 (last change %.3g)'
                                 % (name, change), lambdas, values)
    return best


def spontaneous_2ps(system, f, lambdas=None, tolerance=RICHARDSON_TOLERANCE):
    """Time-integrated filtered two-photon correlation of spontaneous emission

    `system` needs its initial moments (see :meth:`MomentSystem.with_initial_state`).
    Returns ``IntegratedCorrelations(numerator, intensity1, intensity2, g2)``
    where the numerator sums both detection orders.
    """
    if system.v0 is None:
        raise ConfigError('moment system has no initial state')
    if system.has_stationary_source():
        raise ConfigError('the emitter has stationary emission; the integrated '
                          'correlation diverges (use steady_2ps)')
    lambdas = lambda_ladder() if lambdas is None else list(lambdas)
    results = [_Chain(system, f, lam).evaluate() for lam in lambdas]
    numerators, i1s, i2s = zip(*results)
    i1 = _extrapolate('intensity1', lambdas, i1s, tolerance)
    i2 = _extrapolate('intensity2', lambdas, i2s, tolerance)
    numerator = _extrapolate('numerator', lambdas, numerators, tolerance,
                             atol=tolerance * abs(i1 * i2))
    if i1 <= 0 or i2 <= 0:
        raise UndefinedCorrelationError('no filtered emission at (%r, %r)'
                                        % (f.omega1, f.omega2))
    return IntegratedCorrelations(numerator, i1, i2, numerator / (i1 * i2))


def with_sensors(model, mode, f, epsilon=None):
    """`model` extended by sensors ``s1``, ``s2`` (cutoff 1) on `mode`

    Each sensor has energy ``omega_i``, decays at ``Gamma_i`` and couples
    as ``epsilon (a^+ s_i + s_i^+ a)``.
    """
    eps = f.epsilon if epsilon is None else epsilon
    clash = set(SENSOR_MODES) & set(model.space.modes)
    if clash:
        raise ModelError('sensor labels %s are already used by the model' % sorted(clash))
    model.space.index(mode)
    g1, g2 = f.widths()
    return model.extended(
        SENSOR_MODES, (1, 1),
        hamiltonian_terms=[('s1d*s1', f.omega1), ('s2d*s2', f.omega2),
                           (mode + 'd*s1', eps), (mode + 'd*s2', eps)],
        collapse_terms=[('s1', g1), ('s2', g2)])


def sensor_scale(space, epsilon):
    """Expected amplitude ``epsilon**(n_s1 + n_s2)`` of each basis state"""
    occ = space.occupations()
    k = [space.index(s) for s in SENSOR_MODES]
    return float(epsilon) ** occ[:, k].sum(axis=1)


SteadyCorrelation = namedtuple('SteadyCorrelation', 'g2 n1 n2 n1n2 epsilon')


def steady_sensor_correlation(model, mode, f, epsilon=None):
    eps = f.epsilon if epsilon is None else epsilon
    augmented = with_sensors(model, mode, f, eps)
    rho = lindblad.steady_state(augmented, state_scale=sensor_scale(augmented.space, eps))
    n1 = lindblad.expectation(rho, 's1d*s1').real
    n2 = lindblad.expectation(rho, 's2d*s2').real
    n12 = lindblad.expectation(rho, 's1d*s2d*s2*s1').real
    if n1 <= 0 or n2 <= 0:
        raise UndefinedCorrelationError('sensors are empty at (%r, %r)' % (f.omega1, f.omega2))
    return SteadyCorrelation(n12 / (n1 * n2), n1, n2, n12, eps), augmented, rho


def steady_2ps(model, mode, f, epsilon=None, check=True):
    """Stationary ``g2_Gamma(omega1, omega2; 0)`` from the sensor-augmented steady state

    With `check`, sensor populations must stay below 1e-4 and the
    result must agree within 1e-3 with the one at ``epsilon / 2``;
    otherwise :class:`LeadingOrderError`.
    """
    result, augmented, rho = steady_sensor_correlation(model, mode, f, epsilon)
    if check:
        if max(result.n1, result.n2) >= SENSOR_POPULATION_LIMIT:
            raise LeadingOrderError('sensor populations %.3g, %.3g are not small; lower epsilon'
                                    % (result.n1, result.n2), (result.n1, result.n2))
        half, _, _ = steady_sensor_correlation(model, mode, f, result.epsilon / 2)
        if abs(half.g2 - result.g2) > LINEARITY_TOLERANCE * abs(result.g2):
            raise LeadingOrderError('g2 changes from %r to %r when halving epsilon'
                                    % (result.g2, half.g2), (result.g2, half.g2))
    logger.debug('steady g2 at (%r, %r): %r', f.omega1, f.omega2, result.g2)
    return result.g2


def filtered_g2_tau(model, mode, f, taus, epsilon=None):
    """``<n1(0) n2(tau)> / (<n1><n2>)`` by regression on the sensor-augmented steady state"""
    result, augmented, rho = steady_sensor_correlation(model, mode, f, epsilon)
    corr = lindblad.regression_correlator(rho, augmented, 's2d*s2', ('s1', 's1d'), taus)
    return corr.real / (result.n1 * result.n2)


def spontaneous_2ps_direct(model, mode, rho0, f, epsilon=5e-3):
    """Spontaneous-emission correlations from the full sensor-augmented Liouvillian

    The emitter starts in `rho0` with empty sensors. Both time integrals
    are done by :func:`~twophoton.core.lindblad.integrated_deviation`:
    ``I1 = Tr[n1 Y(rho0)]`` and the numerator is
    ``Tr[n2 Y(s1 Y(rho0) s1^+)]`` plus the same with the sensors exchanged.
    Only valid to leading order in `epsilon`.
    """
    if rho0.space != model.space:
        raise ModelError('initial state on %r but model on %r' % (rho0.space, model.space))
    augmented = with_sensors(model, mode, f, epsilon)
    space = augmented.space
    vacuum = np.zeros((4, 4))
    vacuum[0, 0] = 1
    start = DensityMatrix(space, np.kron(rho0.entries, vacuum))
    L = lindblad.build_liouvillian(augmented)
    rho_ss = lindblad.steady_state(augmented, liouvillian=L)
    y0 = lindblad.integrated_deviation(augmented, start.entries, rho_ss, L)
    ops = dict((s, space.annihilator(s).toarray()) for s in SENSOR_MODES)
    n_ops = dict((s, ops[s].T @ ops[s]) for s in SENSOR_MODES)
    intensities = [np.trace(n_ops[s] @ y0).real for s in SENSOR_MODES]
    numerator = 0.0
    for first, second in (('s1', 's2'), ('s2', 's1')):
        x = ops[first] @ y0 @ ops[first].T
        y = lindblad.integrated_deviation(augmented, x, rho_ss, L)
        numerator += np.trace(n_ops[second] @ y).real
    i1, i2 = intensities
    if i1 <= 0 or i2 <= 0:
        raise UndefinedCorrelationError('no filtered emission at (%r, %r)' % (f.omega1, f.omega2))
    return IntegratedCorrelations(numerator, i1, i2, numerator / (i1 * i2))


class SpectrumGrid(object):
    """
    A two-photon spectrum: `values[i, j]` at ``(omega1_axis[i], omega2_axis[j])``

    `errors` holds standard errors where the values are estimates
    (photon streams), else ``None``.
    """

    def __init__(self, omega1_axis, omega2_axis, values, Gamma, tau=0.0, metadata=None,
                 errors=None):
        self.omega1_axis = np.asarray(omega1_axis, dtype=float)
        self.omega2_axis = np.asarray(omega2_axis, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.Gamma = float(Gamma)
        self.tau = float(tau)
        self.metadata = dict(metadata or {})
        self.errors = None if errors is None else np.asarray(errors, dtype=float)
        for axis in (self.omega1_axis, self.omega2_axis):
            if axis.ndim != 1 or len(axis) == 0 or np.any(np.diff(axis) <= 0):
                raise ConfigError('grid axes must be non-empty and strictly increasing')
        shape = (len(self.omega1_axis), len(self.omega2_axis))
        if self.values.shape != shape:
            raise ConfigError('grid values of shape %r do not match axes %r'
                              % (self.values.shape, shape))
        if self.errors is not None and self.errors.shape != shape:
            raise ConfigError('grid errors do not match the axes')
        if not np.all(np.isfinite(self.values)):
            raise NumericalError('grid contains non-finite values')

    def value_at(self, omega1, omega2):
        i = int(np.argmin(np.abs(self.omega1_axis - omega1)))
        j = int(np.argmin(np.abs(self.omega2_axis - omega2)))
        return self.values[i, j]


class CorrelationTrace(object):
    """``g2(tau)`` at fixed filter frequencies"""

    def __init__(self, taus, values, metadata=None, errors=None):
        self.taus = np.asarray(taus, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.metadata = dict(metadata or {})
        self.errors = None if errors is None else np.asarray(errors, dtype=float)
        if self.taus.shape != self.values.shape or self.taus.ndim != 1:
            raise ConfigError('trace delays and values differ in shape')
        if np.any(np.diff(self.taus) <= 0):
            raise ConfigError('trace delays must be strictly increasing')


def map_grid(func, axis1, axis2, threads=1, task='grid'):
    """``func(omega1, omega2)`` on the outer grid, over a pool of `threads` workers

    The result does not depend on the number of threads.
    """
    progress = getLogger('progress', task)
    points = [(i, j) for i in range(len(axis1)) for j in range(len(axis2))]
    values = np.empty((len(axis1), len(axis2)))

    def work(point):
        i, j = point
        return func(axis1[i], axis2[j])

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        for (i, j), value in zip(points, pool.map(work, points)):
            values[i, j] = value
            if j == len(axis2) - 1:
                progress.info('row %d of %d done', i + 1, len(axis1))
    return values


def spontaneous_grid(system, f, axis1, axis2, threads=1, lambdas=None,
                     tolerance=RICHARDSON_TOLERANCE):
    """:func:`spontaneous_2ps` g2 values on a grid, as a :class:`SpectrumGrid`"""
    lambdas = lambda_ladder() if lambdas is None else list(lambdas)

    def point(w1, w2):
        return spontaneous_2ps(system, f.at(w1, w2), lambdas, tolerance).g2

    values = map_grid(point, axis1, axis2, threads, task='spont2ps')
    return SpectrumGrid(axis1, axis2, values, f.Gamma,
                        metadata={'lambda_schedule': lambdas})


def steady_grid(model, mode, f, axis1, axis2, threads=1, epsilon=None):
    """:func:`steady_2ps` on a grid; the leading-order check runs at the first point only"""
    first = steady_2ps(model, mode, f.at(axis1[0], axis2[0]), epsilon, check=True)

    def point(w1, w2):
        if (w1, w2) == (axis1[0], axis2[0]):
            return first
        return steady_2ps(model, mode, f.at(w1, w2), epsilon, check=False)

    values = map_grid(point, axis1, axis2, threads, task='steady2ps')
    return SpectrumGrid(axis1, axis2, values, f.Gamma,
                        metadata={'epsilon': f.epsilon if epsilon is None else epsilon})
