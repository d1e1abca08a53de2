import numpy as np
from hypothesis import given, settings, strategies as st

from ..common import ModelError
from ..fock import FockSpace
from ..operators import (Monomial, Polynomial, normal_order, multiply_normal_keys,
                         validate_mode_labels)
from .utils import assert_raises

MODES = ['a', 'b']

factors = st.tuples(st.sampled_from(MODES), st.booleans())
monomials = st.lists(factors, max_size=4).map(Monomial)


def test_parse_and_format():
    m = Monomial.parse('ad*b', MODES)
    assert m == Monomial([('a', True), ('b', False)])
    assert str(m) == 'ad*b'
    assert str(m.adjoint()) == 'bd*a'
    assert m.charge() == 0
    assert Monomial.parse('1', MODES) == Monomial()
    assert str(Monomial()) == '1'


def test_parse_errors():
    with assert_raises(ModelError):
        Monomial.parse('ad*c', MODES)
    with assert_raises(ModelError):
        Monomial.parse('a**b', MODES)
    with assert_raises(ModelError):
        validate_mode_labels(['b', 'bd'])
    with assert_raises(ModelError):
        validate_mode_labels(['a', 'a'])
    with assert_raises(ModelError):
        validate_mode_labels(['1a'])


def test_canonical_commutator():
    a = Polynomial.parse('a', MODES)
    ad = Polynomial.parse('ad', MODES)
    b = Polynomial.parse('b', MODES)
    assert a.commutator(ad) == Polynomial.identity()
    assert b.commutator(ad) == Polynomial()
    # [a, a^+ a] = a
    assert a.commutator(ad * a) == a


def test_normal_order_of_anti_normal_product():
    # a a a^+ a^+ = a^+2 a^2 + 4 a^+ a + 2
    p = normal_order(Monomial.parse('a*a*ad*ad', MODES))
    assert p == Polynomial({(('a', 2, 2),): 1, (('a', 1, 1),): 4, (): 2})


def test_multiply_normal_keys_across_modes():
    product = multiply_normal_keys((('a', 0, 1), ('b', 1, 0)), (('a', 1, 0),))
    assert product == {(('a', 1, 1), ('b', 1, 0)): 1, (('b', 1, 0),): 1}


def test_hermiticity():
    assert Monomial.parse('ad*a', MODES).is_hermitian()
    assert Monomial.parse('a*ad', MODES).is_hermitian()
    assert not Monomial.parse('ad*b', MODES).is_hermitian()
    assert not Monomial.parse('a', MODES).is_hermitian()


@given(monomials, monomials, monomials)
@settings(max_examples=60, deadline=None)
def test_product_is_associative(x, y, z):
    px, py, pz = normal_order(x), normal_order(y), normal_order(z)
    assert (px * py) * pz == px * (py * pz)
    assert normal_order(x * y) == px * py


@given(monomials)
@settings(max_examples=60, deadline=None)
def test_adjoint_is_compatible(x):
    assert normal_order(x.adjoint()) == normal_order(x).adjoint()
    assert x.adjoint().adjoint() == x
    assert x.adjoint().charge() == -x.charge()


@given(monomials)
@settings(max_examples=40, deadline=None)
def test_normal_order_matches_truncated_matrices(x):
    space = FockSpace(MODES, [6, 6])
    exact = x.matrix(space).toarray()
    ordered = normal_order(x).matrix(space).toarray()
    # columns whose occupations stay below the cutoff under len(x) steps
    reach = 6 - len(x)
    occ = space.occupations()
    columns = np.flatnonzero((occ <= reach).all(axis=1))
    np.testing.assert_allclose(ordered[:, columns], exact[:, columns], atol=1e-9)
