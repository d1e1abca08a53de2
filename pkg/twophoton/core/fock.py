"""
:mod:`twophoton.core.fock` -- Truncated Fock spaces, models and states
======================================================================

A :class:`FockSpace` is the product of single-mode spaces, each cut at a
maximum occupation (inclusive). Basis states are ordered as in
``numpy.kron`` of the single-mode spaces, so the first mode is the most
significant digit::

    >>> space = FockSpace(['a', 'b'], [2, 1])
    >>> space.dimension
    6
    >>> space.occupations()[3].tolist()
    [1, 1]

:class:`LindbladModel` couples a space with Hamiltonian and collapse
terms written in the operator grammar of :mod:`twophoton.core.operators`.
A collapse term ``(O, rate)`` contributes ``rate/2 (2 O rho O^+ - O^+ O rho - rho O^+ O)``,
and a Hamiltonian term ``(O, c)`` contributes ``c (O + O^+)``, or ``c O``
when ``O`` is Hermitian.

Models and spaces are immutable, so they can be shared by worker threads.
"""

import numpy as np
from scipy import sparse
from scipy.special import gammaln

from .common import ModelError
from .operators import Monomial, validate_mode_labels
from .hasher import hash_document

HERMITICITY_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10
POSITIVITY_FLOOR = -1e-8


class FockSpace(object):

    def __init__(self, modes, truncation):
        modes = tuple(str(m) for m in modes)
        if len(modes) == 0:
            raise ModelError('a Fock space needs at least one mode')
        validate_mode_labels(modes)
        if isinstance(truncation, dict):
            try:
                truncation = [truncation[m] for m in modes]
            except KeyError as e:
                raise ModelError('no truncation given for mode %s' % e)
        truncation = tuple(int(t) for t in truncation)
        if len(truncation) != len(modes):
            raise ModelError('%d modes but %d truncations' % (len(modes), len(truncation)))
        if any(t < 0 for t in truncation):
            raise ModelError('truncations must be non-negative: %r' % (truncation,))
        self.modes = modes
        self.truncation = truncation
        self.shape = tuple(t + 1 for t in truncation)
        self.dimension = int(np.prod(self.shape))
        self._operators = {}
        self._occupations = None

    def __eq__(self, other):
        return (isinstance(other, FockSpace) and self.modes == other.modes
                and self.truncation == other.truncation)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.modes, self.truncation))

    def __repr__(self):
        return 'FockSpace(%r, %r)' % (list(self.modes), list(self.truncation))

    def index(self, mode):
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ModelError('unknown mode %r (modes are %s)' % (mode, ', '.join(self.modes)))

    def cutoff(self, mode):
        return self.truncation[self.index(mode)]

    def truncation_dict(self):
        return dict(zip(self.modes, self.truncation))

    def occupations(self):
        """Integer array of shape ``(dimension, n_modes)`` with the occupation
        of each mode in each basis state"""
        if self._occupations is None:
            occ = np.indices(self.shape).reshape(len(self.shape), -1).T
            occ.setflags(write=False)
            self._occupations = occ
        return self._occupations

    def total_occupation(self):
        return self.occupations().sum(axis=1)

    def basis_index(self, occupation):
        if isinstance(occupation, dict):
            occupation = [occupation.get(m, 0) for m in self.modes]
        for n, t in zip(occupation, self.truncation):
            if not 0 <= n <= t:
                raise ModelError('occupation %r outside %r' % (tuple(occupation), self))
        return int(np.ravel_multi_index(tuple(occupation), self.shape))

    def annihilator(self, mode):
        """Sparse matrix of the annihilator of `mode`"""
        op = self._operators.get(mode)
        if op is None:
            k = self.index(mode)
            n = self.truncation[k]
            ladder = sparse.diags(np.sqrt(np.arange(1, n + 1, dtype=float)), 1,
                                  shape=(n + 1, n + 1), format='csr')
            op = sparse.identity(1, format='csr')
            for i, dim in enumerate(self.shape):
                factor = ladder if i == k else sparse.identity(dim, format='csr')
                op = sparse.kron(op, factor, format='csr')
            self._operators[mode] = op
        return op

    def number(self, mode):
        return sparse.diags(self.occupations()[:, self.index(mode)].astype(float), 0, format='csr')

    def with_truncation(self, truncation):
        """A space with the same modes; `truncation` maps modes to new cutoffs"""
        current = self.truncation_dict()
        current.update(truncation)
        return FockSpace(self.modes, current)

    def extended(self, modes, truncation):
        return FockSpace(self.modes + tuple(modes), self.truncation + tuple(truncation))

    def to_tree(self):
        return {'modes': list(self.modes), 'truncation': list(self.truncation)}


def _parse_terms(space, terms, kind):
    parsed = []
    for term in terms:
        try:
            op, value = term
        except (TypeError, ValueError):
            raise ModelError('%s term must be an (operator, value) pair: %r' % (kind, term))
        op = Monomial.parse(op, space.modes)
        if len(op) == 0:
            raise ModelError('%s term with the identity operator' % kind)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ModelError('%s term %s: value %r is not a real number' % (kind, op, value))
        if not np.isfinite(value):
            raise ModelError('%s term %s: value %r is not finite' % (kind, op, value))
        parsed.append((op, value))
    return tuple(parsed)


class LindbladModel(object):
    """
    Parameters
    ----------
    space : FockSpace

    hamiltonian_terms : list of (operator, coefficient)
        Operators are :class:`Monomial` or grammar strings; coefficients
        are real.

    collapse_terms : list of (operator, rate)
        Rates must be non-negative; zero-rate terms are kept but have no
        effect.
    """

    def __init__(self, space, hamiltonian_terms=(), collapse_terms=()):
        self.space = space
        self.hamiltonian_terms = _parse_terms(space, hamiltonian_terms, 'hamiltonian')
        self.collapse_terms = _parse_terms(space, collapse_terms, 'collapse')
        for op, rate in self.collapse_terms:
            if rate < 0:
                raise ModelError('collapse operator %s has negative rate %r' % (op, rate))

    def __repr__(self):
        return '<LindbladModel %s H=%r C=%r>' % (
            self.space,
            [(str(op), c) for op, c in self.hamiltonian_terms],
            [(str(op), r) for op, r in self.collapse_terms])

    def is_phase_covariant(self):
        """Whether the dynamics commutes with the global phase rotation

        Collapse terms of any form are covariant; a Hamiltonian term is
        when it conserves the total number of excitations.
        """
        return all(op.charge() == 0 for op, c in self.hamiltonian_terms)

    def with_truncation(self, truncation):
        return LindbladModel(self.space.with_truncation(truncation),
                             self.hamiltonian_terms, self.collapse_terms)

    def extended(self, modes, truncation, hamiltonian_terms=(), collapse_terms=()):
        """A model on a larger space with additional terms"""
        space = self.space.extended(modes, truncation)
        return LindbladModel(space,
                             self.hamiltonian_terms + tuple(hamiltonian_terms),
                             self.collapse_terms + tuple(collapse_terms))

    def to_tree(self):
        tree = self.space.to_tree()
        tree['hamiltonian'] = [{'operator': str(op), 'coefficient': c}
                               for op, c in self.hamiltonian_terms]
        tree['collapse'] = [{'operator': str(op), 'rate': r}
                            for op, r in self.collapse_terms]
        return tree

    def model_id(self):
        return hash_document('model', self.to_tree())


class DensityMatrix(object):
    """
    A validated density matrix on a :class:`FockSpace`

    Construction checks Hermiticity and unit trace (1e-10) and that no
    eigenvalue is below -1e-8; violations raise :class:`ModelError`.
    """

    def __init__(self, space, entries, validate=True):
        entries = np.array(entries, dtype=complex)
        if entries.shape != (space.dimension, space.dimension):
            raise ModelError('density matrix of shape %r on a space of dimension %d'
                             % (entries.shape, space.dimension))
        self.space = space
        self.entries = entries
        if validate:
            self.validate()

    def validate(self):
        rho = self.entries
        if not np.all(np.isfinite(rho)):
            raise ModelError('density matrix has non-finite entries')
        asym = np.max(np.abs(rho - rho.conj().T))
        if asym > HERMITICITY_TOLERANCE:
            raise ModelError('density matrix is not Hermitian (deviation %.3g)' % asym)
        trace = np.trace(rho)
        if abs(trace - 1) > TRACE_TOLERANCE:
            raise ModelError('density matrix trace is %r, not 1' % trace)
        lowest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if lowest < POSITIVITY_FLOOR:
            raise ModelError('density matrix has negative eigenvalue %.3g' % lowest)

    def __repr__(self):
        return '<DensityMatrix on %r>' % (self.space,)

    def populations(self, mode=None):
        """Diagonal populations, or the marginal distribution of `mode`"""
        p = self.entries.diagonal().real
        if mode is None:
            return p
        k = self.space.index(mode)
        return np.bincount(self.space.occupations()[:, k], weights=p,
                           minlength=self.space.truncation[k] + 1)

    def mean_occupation(self, mode):
        p = self.populations(mode)
        return float(np.dot(np.arange(len(p)), p))


def _embed(space, mode, matrix):
    """Place a single-mode operator on `mode` with every other mode in vacuum"""
    k = space.index(mode)
    n = space.truncation[k] + 1
    occ = space.occupations()
    idx = np.flatnonzero((np.delete(occ, k, axis=1) == 0).all(axis=1))
    idx = idx[np.argsort(occ[idx, k])]
    full = np.zeros((space.dimension, space.dimension), dtype=complex)
    full[np.ix_(idx, idx)] = matrix[:n, :n]
    return full


def _single_mode_state(space, mode, matrix):
    return DensityMatrix(space, _embed(space, mode, matrix))


def _pure(amplitudes):
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    return np.outer(amplitudes, amplitudes.conj())


def fock_state(space, mode, n):
    cutoff = space.cutoff(mode)
    if not 0 <= n <= cutoff:
        raise ModelError('Fock state |%d> does not fit truncation %d of mode %s'
                         % (n, cutoff, mode))
    psi = np.zeros(cutoff + 1)
    psi[n] = 1
    return _single_mode_state(space, mode, _pure(psi))


def coherent_amplitudes(alpha, cutoff):
    n = np.arange(cutoff + 1)
    if alpha == 0:
        return (n == 0).astype(complex)
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag + 1j * n * np.angle(alpha))


def coherent_state(space, mode, alpha):
    """The coherent state ``|alpha>`` cut at the truncation and renormalized"""
    return _single_mode_state(space, mode, _pure(coherent_amplitudes(alpha, space.cutoff(mode))))


def thermal_populations(nbar, cutoff):
    n = np.arange(cutoff + 1)
    if nbar == 0:
        return (n == 0).astype(float)
    p = np.exp(n * np.log(nbar / (1 + nbar))) / (1 + nbar)
    return p / p.sum()


def thermal_state(space, mode, nbar):
    if nbar < 0:
        raise ModelError('thermal occupation must be non-negative, got %r' % nbar)
    return _single_mode_state(space, mode, np.diag(thermal_populations(nbar, space.cutoff(mode))))


def mixture_state(space, mode, n0, weight):
    """`weight` of a coherent state with mean `n0` plus the rest thermal
    with the same mean"""
    if not 0 <= weight <= 1:
        raise ModelError('mixture weight must lie in [0, 1], got %r' % weight)
    coherent = coherent_state(space, mode, np.sqrt(n0)).entries
    thermal = thermal_state(space, mode, n0).entries
    return DensityMatrix(space, weight * coherent + (1 - weight) * thermal)


def random_mixed_state(space, rng, rank=None):
    """A random full-rank (or rank-`rank`) density matrix drawn from `rng`"""
    d = space.dimension
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(space, rho / np.trace(rho).real)


def random_diagonal_state(space, rng):
    p = rng.random(space.dimension)
    return DensityMatrix(space, np.diag(p / p.sum()))


def product_state(space, rhos):
    """Kronecker product of single-mode density matrices, one per mode"""
    entries = np.ones((1, 1), dtype=complex)
    for mode, rho in zip(space.modes, rhos):
        entries = np.kron(entries, rho)
    return DensityMatrix(space, entries)


def _tail_cutoff(populations, tolerance, minimum):
    """Smallest cutoff with the probability above it below `tolerance`"""
    tail = 1 - np.cumsum(populations)
    return max(minimum, int(np.argmax(tail < tolerance)))


def prepare_state(kind, value, mode='a', tolerance=1e-14, weight=0.5, minimum_cutoff=2):
    """A single-mode initial state on a space just large enough for it

    `kind` is ``'thermal'`` or ``'coherent'`` (`value` is the mean
    occupation), ``'mixture'`` (`value` is the mean occupation and
    `weight` the coherent fraction), or ``'fock'`` (`value` is the
    photon number). The cutoff is chosen so the neglected tail holds
    less than `tolerance` of the probability.
    """
    if kind == 'fock':
        n = int(value)
        if n != value or n < 0:
            raise ModelError('Fock state needs a non-negative integer, got %r' % value)
        return fock_state(FockSpace([mode], [max(n, minimum_cutoff)]), mode, n)
    if value < 0:
        raise ModelError('mean occupation must be non-negative, got %r' % value)
    probe = int(max(40, 10 * value + 20 * np.sqrt(value + 1)))
    while True:
        p_thermal = thermal_populations(value, probe) if value > 0 else np.eye(probe + 1)[0]
        p_coherent = np.abs(coherent_amplitudes(np.sqrt(value), probe)) ** 2
        if kind == 'thermal':
            p = p_thermal
        elif kind == 'coherent':
            p = p_coherent
        elif kind == 'mixture':
            p = weight * p_coherent + (1 - weight) * p_thermal
        else:
            raise ModelError('unknown state kind %r' % kind)
        if 1 - p.sum() < tolerance and p[-1] < tolerance:
            break
        probe *= 2
    space = FockSpace([mode], [_tail_cutoff(p, tolerance, minimum_cutoff)])
    if kind == 'thermal':
        return thermal_state(space, mode, value)
    elif kind == 'coherent':
        return coherent_state(space, mode, np.sqrt(value))
    else:
        return mixture_state(space, mode, value, weight)
