"""
:mod:`twophoton.core.operators` -- Monomials in bosonic mode operators
=====================================================================

Operators are written in a small grammar: factors joined by ``*``,
where a mode label stands for its annihilator and the label followed
by ``d`` for its creator. ``"ad*b"`` is :math:`a^\\dagger b`, and
``"1"`` is the identity::

    >>> m = Monomial.parse('ad*ad*a', ['a', 'b'])
    >>> m
    Monomial('ad*ad*a')
    >>> m.charge()
    1
    >>> m.adjoint()
    Monomial('ad*a*a')

Two representations are used. :class:`Monomial` keeps the factors in the
order written and produces truncated Fock-space matrices. The
normal-ordered form is a :class:`Polynomial` keyed by *normal keys*:
sorted tuples of ``(mode, p, q)`` standing for the product over modes
of :math:`a^{\\dagger p} a^q`. The product of normal keys uses the
per-mode rule

.. math::

    (a^{\\dagger p_1} a^{q_1})(a^{\\dagger p_2} a^{q_2}) =
    \\sum_k k! \\binom{q_1}{k}\\binom{p_2}{k} a^{\\dagger p_1+p_2-k} a^{q_1+q_2-k}

so the algebra is exact and independent of any truncation::

    >>> a, ad = Polynomial.parse('a', ['a']), Polynomial.parse('ad', ['a'])
    >>> a.commutator(ad) == Polynomial.identity()
    True
"""

import re
from math import comb, factorial

from scipy import sparse

from .common import ModelError

_LABEL_RE = re.compile(r'^[A-Za-z][A-Za-z0-9_]*$')


def validate_mode_labels(modes):
    """Check that `modes` can be used with the operator grammar

    Labels must be unique identifiers, and no label may equal another
    label followed by ``d`` (``"b"`` and ``"bd"`` cannot coexist since
    ``"bd"`` would be ambiguous).
    """
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise ModelError('mode labels must be unique: %r' % (modes,))
    for mode in modes:
        if not _LABEL_RE.match(mode):
            raise ModelError('invalid mode label %r' % mode)
        if mode.endswith('d') and mode[:-1] in modes:
            raise ModelError('mode label %r is ambiguous with the creator of %r'
                             % (mode, mode[:-1]))


class Monomial(tuple):
    """
    A product of ladder operators, as a tuple of ``(mode, dagger)``
    factors in the order written.
    """

    def __new__(cls, factors=()):
        return tuple.__new__(cls, tuple((str(mode), bool(dagger)) for mode, dagger in factors))

    @classmethod
    def parse(cls, text, modes):
        """Parse the ``*``-joined grammar against the given mode labels"""
        if isinstance(text, Monomial):
            missing = text.modes() - set(modes)
            if missing:
                raise ModelError('operator %s references unknown modes %s'
                                 % (text, sorted(missing)))
            return text
        text = str(text).strip()
        if text in ('', '1'):
            return cls()
        lookup = {}
        for mode in modes:
            lookup[mode] = (mode, False)
            lookup[mode + 'd'] = (mode, True)
        factors = []
        for token in text.split('*'):
            token = token.strip()
            try:
                factors.append(lookup[token])
            except KeyError:
                raise ModelError('operator %r: unknown factor %r (modes are %s)'
                                 % (text, token, ', '.join(modes)))
        return cls(factors)

    @classmethod
    def from_normal_key(cls, key):
        factors = []
        for mode, p, q in key:
            factors.extend([(mode, True)] * p)
            factors.extend([(mode, False)] * q)
        return cls(factors)

    def __str__(self):
        if not self:
            return '1'
        return '*'.join(mode + ('d' if dagger else '') for mode, dagger in self)

    def __repr__(self):
        return 'Monomial(%r)' % str(self)

    def __mul__(self, other):
        return Monomial(tuple(self) + tuple(other))

    def adjoint(self):
        return Monomial((mode, not dagger) for mode, dagger in reversed(self))

    def charge(self):
        """Net number of excitations created: #creators - #annihilators"""
        return sum(1 if dagger else -1 for mode, dagger in self)

    def modes(self):
        return set(mode for mode, dagger in self)

    def normal_ordered(self):
        return normal_order(self)

    def is_hermitian(self):
        """Whether the operator equals its adjoint (using the commutation relations)"""
        p = self.normal_ordered()
        return p == p.adjoint()

    def matrix(self, space):
        """The operator on a truncated Fock space, as a sparse CSR matrix"""
        op = sparse.identity(space.dimension, dtype=complex, format='csr')
        for mode, dagger in self:
            a = space.annihilator(mode)
            op = op @ (a.T if dagger else a)
        return op.tocsr()


def _mode_product(p1, q1, p2, q2):
    for k in range(min(q1, p2) + 1):
        yield factorial(k) * comb(q1, k) * comb(p2, k), p1 + p2 - k, q1 + q2 - k


def multiply_normal_keys(x, y):
    """Normal-ordered product of two normal keys, as ``{key: coefficient}``

    >>> multiply_normal_keys((('a', 0, 1),), (('a', 1, 0),))
    {(('a', 1, 1),): 1, (): 1}
    """
    xs = dict((mode, (p, q)) for mode, p, q in x)
    ys = dict((mode, (p, q)) for mode, p, q in y)
    terms = {(): 1}
    for mode in sorted(set(xs) | set(ys)):
        p1, q1 = xs.get(mode, (0, 0))
        p2, q2 = ys.get(mode, (0, 0))
        product = {}
        for key, coeff in terms.items():
            for c, p, q in _mode_product(p1, q1, p2, q2):
                new_key = key + ((mode, p, q),) if (p, q) != (0, 0) else key
                product[new_key] = product.get(new_key, 0) + coeff * c
        terms = product
    return terms


def normal_key_str(key):
    return str(Monomial.from_normal_key(key))


def normal_key_charge(key):
    return sum(p - q for mode, p, q in key)


class Polynomial(dict):
    """
    A linear combination of normal keys: ``{normal_key: coefficient}``

    Zero coefficients are dropped, so equality is equality of operators.
    """

    def __init__(self, terms=()):
        dict.__init__(self)
        items = terms.items() if isinstance(terms, dict) else terms
        for key, coeff in items:
            if coeff != 0:
                self[key] = self.get(key, 0) + coeff
                if self[key] == 0:
                    del self[key]

    @classmethod
    def identity(cls):
        return cls({(): 1})

    @classmethod
    def parse(cls, text, modes):
        return normal_order(Monomial.parse(text, modes))

    def __add__(self, other):
        result = Polynomial(self)
        for key, coeff in other.items():
            value = result.get(key, 0) + coeff
            if value == 0:
                result.pop(key, None)
            else:
                result[key] = value
        return result

    def __neg__(self):
        return Polynomial((key, -coeff) for key, coeff in self.items())

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial((key, coeff * other) for key, coeff in self.items())
        result = Polynomial()
        for kx, cx in self.items():
            for ky, cy in other.items():
                result = result + Polynomial(
                    (key, cx * cy * c) for key, c in multiply_normal_keys(kx, ky).items())
        return result

    def __rmul__(self, scalar):
        return Polynomial((key, scalar * coeff) for key, coeff in self.items())

    def adjoint(self):
        return Polynomial((tuple((mode, q, p) for mode, p, q in key), complex(coeff).conjugate()
                           if isinstance(coeff, complex) else coeff)
                          for key, coeff in self.items())

    def commutator(self, other):
        return self * other - other * self

    def matrix(self, space):
        op = sparse.csr_matrix((space.dimension, space.dimension), dtype=complex)
        for key, coeff in self.items():
            op = op + coeff * Monomial.from_normal_key(key).matrix(space)
        return op.tocsr()

    def __repr__(self):
        if not self:
            return 'Polynomial(0)'
        return 'Polynomial(%s)' % ' + '.join('(%r)*%s' % (coeff, normal_key_str(key))
                                              for key, coeff in sorted(self.items()))


def normal_order(monomial):
    """Rewrite a :class:`Monomial` as a normal-ordered :class:`Polynomial`

    >>> normal_order(Monomial.parse('a*ad', ['a']))
    Polynomial((1)*1 + (1)*ad*a)
    """
    result = Polynomial.identity()
    for mode, dagger in monomial:
        key = ((mode, 1, 0),) if dagger else ((mode, 0, 1),)
        result = result * Polynomial({key: 1})
    return result
