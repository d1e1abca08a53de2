"""
:mod:`twophoton.core.lindblad` -- Liouvillians, evolution and steady states
===========================================================================

Density matrices are vectorized by stacking columns, so entry
``rho[i, j]`` sits at index ``i + D*j`` and ``vec(A rho B) = (B^T kron A) vec(rho)``.
The superoperator is stored dense up to 64 entries per side and as a
scipy CSR matrix above that.

When the model is phase covariant (see
:meth:`~twophoton.core.fock.LindbladModel.is_phase_covariant`) the
Liouvillian does not mix entries of different coherence charge
``N_i - N_j``. Steady states are then solved in the charge-zero block,
and regression correlators and spectra in the block of the initial
operator, which is what makes the condensate with two sensors
tractable.

All routines log their sizes and residuals to the module logger at
DEBUG level.
"""

import numpy as np
from scipy import sparse, linalg
from scipy.sparse import linalg as sparse_linalg
from scipy.optimize import brentq

from ..util.logger_setup import getLogger
from .common import (CapacityError, ModelError, ConfigError, IntegrationError,
                     NonUniqueSteadyStateError, NumericalError, TruncationError,
                     UndefinedCorrelationError)
from .fock import DensityMatrix
from .operators import Monomial, Polynomial

logger = getLogger(__name__)

DENSE_LIMIT = 64
MAX_LIOUVILLE_DIMENSION = 4 * 10 ** 6
NULL_SPACE_LIMIT = 600
SPECTRAL_GAP = 1e3
RESIDUAL_TOLERANCE = 1e-10
BORDER_TOLERANCE = 1e-6
TRACE_DRIFT_TOLERANCE = 1e-9
TRUNCATION_TOLERANCE = 1e-6


def vec(matrix):
    return np.asarray(matrix).reshape(-1, order='F')


def unvec(vector, dimension):
    return np.asarray(vector).reshape((dimension, dimension), order='F')


def trace_functional(dimension):
    """Row vector ``t`` with ``t . vec(rho) = Tr(rho)``"""
    t = np.zeros(dimension * dimension)
    t[np.arange(dimension) * (dimension + 1)] = 1
    return t


def operator_matrix(op, space):
    """Sparse matrix of a grammar string, :class:`Monomial`, :class:`Polynomial`
    or anything already a matrix"""
    if isinstance(op, Polynomial):
        return op.matrix(space)
    if isinstance(op, (str, Monomial)):
        return Monomial.parse(op, space.modes).matrix(space)
    return sparse.csr_matrix(op)


def hamiltonian_matrix(model):
    space = model.space
    h = sparse.csr_matrix((space.dimension, space.dimension), dtype=complex)
    for op, coeff in model.hamiltonian_terms:
        m = op.matrix(space)
        if op.is_hermitian():
            h = h + coeff * m
        else:
            h = h + coeff * (m + m.conj().T)
    return h.tocsr()


def build_liouvillian(model, max_dimension=None, dense_limit=DENSE_LIMIT):
    """The superoperator ``L`` with ``d vec(rho)/dt = L vec(rho)``

    Both limits count the Liouville-space dimension ``D**2``, the side of
    the superoperator, not the Hilbert-space dimension ``D``. Returns a
    dense array when ``D**2 <= dense_limit`` and a CSR matrix otherwise.
    Raises :class:`CapacityError` when ``D**2`` exceeds `max_dimension`.
    """
    space = model.space
    d = space.dimension
    n = d * d
    limit = MAX_LIOUVILLE_DIMENSION if max_dimension is None else max_dimension
    if n > limit:
        raise CapacityError('Liouville space of dimension %d exceeds the limit %d'
                            % (n, limit), n, limit)
    eye = sparse.identity(d, dtype=complex, format='csr')
    h = hamiltonian_matrix(model)
    L = -1j * (sparse.kron(eye, h) - sparse.kron(h.T, eye))
    for op, rate in model.collapse_terms:
        if rate == 0:
            continue
        o = op.matrix(space)
        odo = (o.conj().T @ o).tocsr()
        L = L + 0.5 * rate * (2 * sparse.kron(o.conj(), o)
                              - sparse.kron(eye, odo) - sparse.kron(odo.T, eye))
    L = sparse.csr_matrix(L)
    L.eliminate_zeros()
    logger.debug('Liouvillian of dimension %d with %d non-zeros', n, L.nnz)
    if n <= dense_limit:
        return L.toarray()
    return L


def coherence_charges(space):
    """Charge ``N_i - N_j`` of each entry of ``vec(rho)``"""
    total = space.total_occupation()
    return vec(total[:, None] - total[None, :])


def sector_indices(space, charge):
    return np.flatnonzero(coherence_charges(space) == charge)


def _block(L, idx):
    if sparse.issparse(L):
        return L[idx][:, idx].tocsr()
    return sparse.csr_matrix(L[np.ix_(idx, idx)])


def _sector_of(model, x):
    """Indices of the smallest block containing the vector `x`, or all indices"""
    n = len(x)
    if not model.is_phase_covariant():
        return np.arange(n)
    charges = coherence_charges(model.space)
    present = np.unique(charges[np.abs(x) > 0])
    if len(present) == 1:
        return np.flatnonzero(charges == present[0])
    return np.arange(n)


def _inf_norm(A):
    return float(abs(A).sum(axis=1).max()) if A.shape[0] else 0.0


class _BorderedSystem(object):
    """
    ``A`` with one diagonal row replaced by the trace row, factorized once
    so that ``A x = b`` with ``t . x = c`` can be solved repeatedly.
    """

    def __init__(self, A, trace_row, row):
        n = A.shape[0]
        keep = np.ones(n)
        keep[row] = 0
        cols = np.flatnonzero(trace_row)
        border = sparse.csr_matrix((trace_row[cols], (np.full(len(cols), row), cols)),
                                   shape=(n, n))
        self.matrix = (sparse.diags(keep) @ A + border).tocsc()
        self.row = row
        try:
            self.lu = sparse_linalg.splu(self.matrix)
        except RuntimeError as e:
            raise NonUniqueSteadyStateError('bordered Liouvillian is singular: %s' % e)

    def solve(self, b, trace_value):
        b = np.array(b, dtype=complex)
        b[self.row] = trace_value
        x = self.lu.solve(b)
        # one step of iterative refinement
        x = x + self.lu.solve(b - self.matrix @ x)
        if not np.all(np.isfinite(x)):
            raise NonUniqueSteadyStateError('bordered solve produced non-finite values')
        return x


def _bordered_residual(A, x):
    """Whether ``A x`` vanishes to round-off relative to ``|A| |x|``"""
    scale = max(1.0, _inf_norm(A) * np.max(np.abs(x)))
    return np.max(np.abs(A @ x)) <= RESIDUAL_TOLERANCE * scale


def _scaled_block(L, idx, dimension, state_scale):
    Ls = _block(L, idx)
    if state_scale is None:
        return Ls, np.ones(len(idx))
    s = np.asarray(state_scale, dtype=float)
    w = s[idx % dimension] * s[idx // dimension]
    return (sparse.diags(1 / w) @ Ls @ sparse.diags(w)).tocsr(), w


def steady_state(model, state_scale=None, liouvillian=None, null_space_limit=NULL_SPACE_LIMIT):
    """The unique stationary state of `model`

    Small blocks are solved by SVD, requiring the second-smallest
    singular value to exceed the smallest by 1e3; larger blocks by a
    trace-bordered sparse LU solve checked against a second bordering.
    Either way a degenerate null space raises
    :class:`NonUniqueSteadyStateError`.

    Parameters
    ----------
    state_scale : array of length D, optional
        Expected amplitude of each basis state. The solve runs on the
        rescaled vector ``rho_ij / (s_i s_j)``, which keeps relative
        accuracy in blocks that are many orders of magnitude smaller
        than the rest (weakly coupled sensors).
    """
    space = model.space
    d = space.dimension
    L = build_liouvillian(model) if liouvillian is None else liouvillian
    idx = sector_indices(space, 0) if model.is_phase_covariant() else np.arange(d * d)
    A, w = _scaled_block(L, idx, d, state_scale)
    diagonal = np.flatnonzero(idx % (d + 1) == 0)
    t = np.zeros(len(idx))
    t[diagonal] = 1
    logger.debug('steady state of %r in a block of size %d', space, len(idx))

    if len(idx) <= null_space_limit:
        u, s, vh = linalg.svd(A.toarray())
        if len(s) > 1 and not s[-2] > SPECTRAL_GAP * s[-1]:
            raise NonUniqueSteadyStateError(
                'steady state is not unique: smallest singular values %.3g and %.3g'
                % (s[-1], s[-2]))
        x = w * vh[-1].conj()
    else:
        tw = t * w
        first = _BorderedSystem(A, tw, diagonal[0]).solve(np.zeros(len(idx)), 1.0)
        second = _BorderedSystem(A, tw, diagonal[-1]).solve(np.zeros(len(idx)), 1.0)
        gap = np.max(np.abs(first - second)) / np.max(np.abs(first))
        logger.debug('normalization rows differ by %.3g', gap)
        # an ill-conditioned but unique solve moves with the row by round-off only
        if gap > BORDER_TOLERANCE or not (_bordered_residual(A, first) and
                                          _bordered_residual(A, second)):
            raise NonUniqueSteadyStateError(
                'steady state depends on the normalization row (relative gap %.3g)' % gap)
        x = w * first
    x = x / np.dot(t, x)

    full = np.zeros(d * d, dtype=complex)
    full[idx] = x
    residual = np.max(np.abs(sparse.csr_matrix(L) @ full))
    scale = max(1.0, _inf_norm(sparse.csr_matrix(L)) * np.max(np.abs(full)))
    logger.debug('steady state residual %.3g (scale %.3g)', residual, scale)
    if residual > RESIDUAL_TOLERANCE * scale:
        raise NonUniqueSteadyStateError('steady state residual %.3g too large' % residual)
    rho = unvec(full, d)
    return DensityMatrix(space, 0.5 * (rho + rho.conj().T))


def _propagate(L, x, times):
    """``exp(L t) x`` for each of the non-decreasing `times`"""
    out = []
    current = x
    previous = 0.0
    dense = not sparse.issparse(L)
    for t in times:
        dt = t - previous
        if dt > 0:
            if dense:
                current = linalg.expm(L * dt) @ current
            else:
                current = sparse_linalg.expm_multiply(L * dt, current)
        out.append(current)
        previous = t
    return out


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or not np.all(np.isfinite(times)):
        raise ConfigError('times must be a list of finite non-negative numbers')
    return times


def evolve(rho0, model, times, liouvillian=None):
    """``rho(t)`` for each of `times`, by scaled matrix exponentials

    Each result is validated as a density matrix; a trace drift above
    1e-9 or a failed validation raises :class:`IntegrationError`.
    """
    if rho0.space != model.space:
        raise ModelError('initial state on %r but model on %r' % (rho0.space, model.space))
    times = _check_times(times)
    d = model.space.dimension
    L = build_liouvillian(model) if liouvillian is None else liouvillian
    order = np.argsort(times, kind='stable')
    t_row = trace_functional(d)
    results = [None] * len(times)
    for i, x in zip(order, _propagate(L, vec(rho0.entries), times[order])):
        if not np.all(np.isfinite(x)):
            raise IntegrationError('evolution produced non-finite values at t=%r' % times[i])
        drift = abs(np.dot(t_row, x) - 1)
        if drift > TRACE_DRIFT_TOLERANCE:
            raise IntegrationError('trace drifted by %.3g at t=%r' % (drift, times[i]),
                                   achieved_tolerance=drift)
        try:
            results[i] = DensityMatrix(model.space, unvec(x, d))
        except ModelError as e:
            raise IntegrationError('invalid state at t=%r: %s' % (times[i], e),
                                   achieved_tolerance=drift)
    return results


def expectation(rho, op):
    """``Tr(rho op)`` for an operator in any form accepted by :func:`operator_matrix`"""
    m = operator_matrix(op, rho.space)
    return complex(m.multiply(rho.entries.T).sum())


def regression_correlator(rho, model, left, sandwich, taus, liouvillian=None):
    """``Tr[left exp(L tau)(pre rho post)]`` for each tau

    ``sandwich`` is the pair ``(pre, post)``. With ``left = a^+ a`` and
    ``sandwich = (a, a^+)`` this is ``<a^+(0) a^+(tau) a(tau) a(0)>``.
    """
    space = model.space
    if rho.space != space:
        raise ModelError('state on %r but model on %r' % (rho.space, space))
    taus = _check_times(taus)
    pre, post = sandwich
    x0 = operator_matrix(pre, space) @ rho.entries @ operator_matrix(post, space)
    x0 = vec(np.asarray(x0))
    l_row = vec(operator_matrix(left, space).T.toarray())
    if not np.any(x0):
        return np.zeros(len(taus), dtype=complex)
    L = build_liouvillian(model) if liouvillian is None else liouvillian
    idx = _sector_of(model, x0)
    Ls = _block(L, idx)
    if Ls.shape[0] <= DENSE_LIMIT:
        Ls = Ls.toarray()
    logger.debug('regression in a block of size %d', len(idx))
    order = np.argsort(taus, kind='stable')
    values = np.zeros(len(taus), dtype=complex)
    for i, x in zip(order, _propagate(Ls, x0[idx], taus[order])):
        if not np.all(np.isfinite(x)):
            raise IntegrationError('regression produced non-finite values at tau=%r' % taus[i])
        values[i] = np.dot(l_row[idx], x)
    return values


def g2_zero(rho, mode):
    """Zero-delay second-order correlation of `mode` from the populations

    >>> from twophoton.core.fock import FockSpace, fock_state
    >>> g2_zero(fock_state(FockSpace(['a'], [3]), 'a', 2), 'a')
    0.5
    """
    p = rho.populations(mode)
    n = np.arange(len(p))
    mean = np.dot(n, p)
    if mean <= 1e-14:
        raise UndefinedCorrelationError('g2(0) is undefined for an empty mode %s' % mode)
    return float(np.dot(n * (n - 1), p) / mean ** 2)


def integrated_deviation(model, x, rho_ss, liouvillian=None):
    """``Y = int_0^inf (exp(L t) x - Tr(x) rho_ss) dt`` as a matrix

    Solves ``L y = -(x - Tr(x) rho_ss)`` with ``Tr y = 0``. Operators in a
    coherence block of non-zero charge have no stationary part and are
    solved by a plain factorization.
    """
    space = model.space
    d = space.dimension
    L = build_liouvillian(model) if liouvillian is None else liouvillian
    xv = vec(x)
    idx = _sector_of(model, xv)
    A = _block(L, idx)
    charges = coherence_charges(space)[idx]
    if np.all(charges == charges[0]) and charges[0] != 0:
        try:
            y = sparse_linalg.splu(A.tocsc()).solve(-xv[idx].astype(complex))
        except RuntimeError as e:
            raise NumericalError('Liouvillian block is singular: %s' % e)
    else:
        t = np.zeros(len(idx))
        t[idx % (d + 1) == 0] = 1
        b = -(xv - np.trace(x) * vec(rho_ss.entries))[idx]
        diagonal = np.flatnonzero(t)
        y = _BorderedSystem(A, t, diagonal[0]).solve(b, 0.0)
    full = np.zeros(d * d, dtype=complex)
    full[idx] = y
    return unvec(full, d)


def emission_spectrum(model, rho_ss, mode, omegas, liouvillian=None):
    """Stationary power spectrum of `mode`

    ``S(w) = (1/pi) Re int_0^inf exp(i w tau) <a^+(0) a(tau)> dtau``, which
    the regression theorem turns into a resolvent of the Liouvillian in
    the charge +1 block.
    """
    space = model.space
    L = build_liouvillian(model) if liouvillian is None else liouvillian
    a = space.annihilator(mode)
    x0 = vec(np.asarray(rho_ss.entries @ a.T.toarray()))
    idx = _sector_of(model, x0)
    A = _block(L, idx).tocsc()
    l_row = vec(a.T.toarray())[idx]
    eye = sparse.identity(len(idx), dtype=complex, format='csc')
    values = []
    for omega in np.atleast_1d(omegas):
        y = sparse_linalg.splu((A + 1j * omega * eye).tocsc()).solve(-x0[idx])
        values.append(np.dot(l_row, y).real / np.pi)
    return np.array(values)


def line_halfwidth(model, rho_ss, mode, liouvillian=None, start=1.0):
    """Half width at half maximum of the emission line centred at zero"""
    L = build_liouvillian(model) if liouvillian is None else liouvillian
    peak = emission_spectrum(model, rho_ss, mode, [0.0], L)[0]

    def excess(omega):
        return emission_spectrum(model, rho_ss, mode, [omega], L)[0] - 0.5 * peak

    hi = start
    for i in range(60):
        if excess(hi) < 0:
            break
        hi *= 2
    else:
        raise NumericalError('emission line of %s has no half maximum' % mode)
    width = brentq(excess, 0.0, hi, xtol=1e-10)
    logger.debug('half width of mode %s: %r', mode, width)
    return width


def auto_truncate(build, truncation, tolerance=TRUNCATION_TOLERANCE, step=2, max_rounds=10,
                  modes=None):
    """Grow the truncation until the top level of every mode is nearly empty

    `build` maps a ``{mode: cutoff}`` dict to a :class:`LindbladModel`.
    Each round solves the steady state and adds `step` to every mode in
    `modes` whose top-level population is at least `tolerance`.

    Returns ``(model, rho_ss)``.
    """
    truncation = dict(truncation)
    modes = list(truncation) if modes is None else list(modes)
    previous = None
    for i in range(max_rounds):
        model = build(truncation)
        rho = steady_state(model)
        tops = dict((mode, rho.populations(mode)[-1]) for mode in modes)
        grow = [mode for mode in modes if tops[mode] >= tolerance]
        if not grow:
            logger.debug('truncation %r accepted (top populations %r)', truncation, tops)
            return model, rho
        logger.debug('top populations %r; growing %s', tops, ', '.join(grow))
        previous = dict(truncation)
        for mode in grow:
            truncation[mode] += step
    raise TruncationError('truncation did not stabilize after %d rounds' % max_rounds,
                          previous, truncation)
