import numpy as np
from scipy import sparse

from ..common import CapacityError, ModelError, NonUniqueSteadyStateError, \
    UndefinedCorrelationError, TruncationError
from .. import fock
from ..fock import FockSpace, LindbladModel
from .. import lindblad
from ..lindblad import (build_liouvillian, evolve, steady_state, regression_correlator,
                        g2_zero, expectation, vec, unvec, trace_functional)
from ...util.logger_fixtures import log_capture
from .utils import assert_raises


def decay_dephasing(truncation, gamma_phi=0.0, gamma_a=1.0):
    return LindbladModel(FockSpace(['a'], [truncation]),
                         collapse_terms=[('a', gamma_a), ('ad*a', gamma_phi)])


def condensate(truncation_a=2, truncation_b=2, gamma_a=1.0, gamma_b=1.0, P_b=1.0, P_ba=10.0):
    return LindbladModel(FockSpace(['a', 'b'], [truncation_a, truncation_b]),
                         collapse_terms=[('a', gamma_a), ('b', gamma_b), ('bd', P_b),
                                         ('ad*b', P_ba)])


def apply(L, rho):
    d = rho.shape[0]
    return unvec(np.asarray(L @ vec(rho)), d)


def test_two_level_decay():
    model = decay_dephasing(1)
    L = build_liouvillian(model)
    assert isinstance(L, np.ndarray)
    drho = apply(L, np.diag([0.0, 1.0]))
    np.testing.assert_allclose(drho, np.diag([1.0, -1.0]), atol=1e-15)


def test_pure_dephasing_rate():
    model = LindbladModel(FockSpace(['a'], [1]), collapse_terms=[('ad*a', 0.8)])
    rho = np.array([[0.5, 0.5], [0.5, 0.5]])
    drho = apply(build_liouvillian(model), rho)
    np.testing.assert_allclose(drho.diagonal(), [0, 0], atol=1e-15)
    np.testing.assert_allclose(drho[0, 1], -0.4 * 0.5, rtol=1e-14)


def test_hamiltonian_rotation():
    model = LindbladModel(FockSpace(['a'], [1]), hamiltonian_terms=[('ad*a', 2.0)])
    rho = np.array([[0.5, 0.5], [0.5, 0.5]])
    drho = apply(build_liouvillian(model), rho)
    # d rho_01/dt = -i (0 - 2) rho_01
    np.testing.assert_allclose(drho[0, 1], 2j * 0.5, rtol=1e-14)


def test_condensate_preserves_trace():
    for truncation in [(2, 2), (4, 3)]:
        L = build_liouvillian(condensate(*truncation))
        d = int(round(np.sqrt(L.shape[0])))
        t = trace_functional(d)
        left = sparse.csr_matrix(L).T @ t
        assert np.max(np.abs(left)) <= 1e-12


def test_storage_and_capacity():
    # the switch counts Liouville-space entries D**2, not Hilbert-space levels
    L = build_liouvillian(decay_dephasing(7))
    assert isinstance(L, np.ndarray) and L.shape == (64, 64)
    L = build_liouvillian(decay_dephasing(8))
    assert sparse.issparse(L) and L.shape == (81, 81)
    with assert_raises(CapacityError) as r:
        build_liouvillian(decay_dephasing(8), max_dimension=80)
    assert r.exc_val.dimension == 81


def test_evolve_single_photon_decay():
    model = decay_dephasing(1)
    rho0 = fock.fock_state(model.space, 'a', 1)
    times = [0.0, 0.5, 2.0, 1.0]
    for t, rho in zip(times, evolve(rho0, model, times)):
        assert abs(rho.entries[1, 1] - np.exp(-t)) < 1e-8


def test_mean_occupation_decays_exponentially():
    rng = np.random.default_rng(3)
    model = decay_dephasing(6, gamma_phi=0.7)
    rho0 = fock.random_mixed_state(model.space, rng)
    n0 = rho0.mean_occupation('a')
    times = np.linspace(0, 3, 7)
    for t, rho in zip(times, evolve(rho0, model, times)):
        assert abs(rho.mean_occupation('a') - n0 * np.exp(-t)) < 1e-8


def test_g2_constant_in_time():
    model = decay_dephasing(30, gamma_phi=1.0)
    cases = [(fock.thermal_state(model.space, 'a', 0.5), 2.0),
             (fock.coherent_state(model.space, 'a', 1.0), 1.0),
             (fock.fock_state(model.space, 'a', 2), 0.5)]
    for rho0, g2 in cases:
        g0 = g2_zero(rho0, 'a')
        assert abs(g0 - g2) < 1e-7
        for rho in evolve(rho0, model, [0.3, 1.0, 2.5]):
            assert abs(g2_zero(rho, 'a') - g0) < 1e-7


def test_evolve_rejects_foreign_state():
    model = decay_dephasing(2)
    with assert_raises(ModelError):
        evolve(fock.fock_state(FockSpace(['a'], [3]), 'a', 1), model, [1.0])


def test_g2_zero_requires_population():
    space = FockSpace(['a'], [2])
    with assert_raises(UndefinedCorrelationError):
        g2_zero(fock.fock_state(space, 'a', 0), 'a')


def test_steady_state_of_decay_is_vacuum():
    model = decay_dephasing(4, gamma_phi=0.3)
    rho = steady_state(model)
    expected = np.zeros((5, 5))
    expected[0, 0] = 1
    np.testing.assert_allclose(rho.entries, expected, atol=1e-12)


def test_steady_state_rejects_degenerate_models():
    model = LindbladModel(FockSpace(['a'], [2]), collapse_terms=[('ad*a', 1.0)])
    with assert_raises(NonUniqueSteadyStateError):
        steady_state(model)
    with assert_raises(NonUniqueSteadyStateError):
        steady_state(model, null_space_limit=0)


def test_steady_state_matches_long_time_limit():
    model = condensate(3, 2, P_b=1.0, P_ba=2.0)
    rho_ss = steady_state(model)
    rho0 = fock.product_state(model.space, [np.diag([1.0, 0, 0, 0]), np.diag([1.0, 0, 0])])
    late, = evolve(rho0, model, [50.0])
    np.testing.assert_allclose(late.entries, rho_ss.entries, atol=1e-6)


def test_sparse_and_dense_steady_states_agree():
    model = condensate(6, 3)
    with log_capture('twophoton.core.lindblad') as log:
        dense = steady_state(model)
        bordered = steady_state(model, null_space_limit=0)
    log.assertLogged('block of size')
    log.assertLogged('normalization rows differ by')
    np.testing.assert_allclose(dense.entries, bordered.entries, atol=1e-10)


def test_regression_thermal_g2_is_flat():
    model = decay_dephasing(40, gamma_phi=1.0)
    rho = fock.thermal_state(model.space, 'a', 0.5)
    taus = [0.0, 0.5, 1.0, 3.0]
    num = regression_correlator(rho, model, 'ad*a', ('a', 'ad'), taus)
    n_t = np.array([r.mean_occupation('a') for r in evolve(rho, model, taus)])
    g2 = num.real / (0.5 * n_t)
    np.testing.assert_allclose(g2, 2.0, rtol=1e-7)
    assert abs(num[0] - expectation(rho, 'ad*ad*a*a')) < 1e-12


def test_regression_coherent_and_vacuum():
    model = decay_dephasing(30)
    rho = fock.coherent_state(model.space, 'a', 1.0)
    taus = [0.0, 0.7, 2.0]
    num = regression_correlator(rho, model, 'ad*a', ('a', 'ad'), taus)
    n_t = np.exp(-np.array(taus))
    np.testing.assert_allclose(num.real / n_t, 1.0, rtol=1e-7)
    vacuum = fock.fock_state(model.space, 'a', 0)
    assert not np.any(regression_correlator(vacuum, model, 'ad*a', ('a', 'ad'), taus))


def test_integrated_deviation_of_decay():
    model = decay_dephasing(3)
    rho_ss = steady_state(model)
    rho0 = fock.fock_state(model.space, 'a', 2)
    y = lindblad.integrated_deviation(model, rho0.entries, rho_ss)
    # int_0^inf <n>(t) dt = 2 / gamma_a
    assert abs(expectation(rho_ss, 'ad*a')) < 1e-14
    n = model.space.number('a').toarray()
    assert abs(np.trace(n @ y) - 2.0) < 1e-10
    assert abs(np.trace(y)) < 1e-12


def test_emission_spectrum_is_lorentzian():
    model = LindbladModel(FockSpace(['a'], [1]),
                          collapse_terms=[('a', 1.0), ('ad', 0.5), ('ad*a', 0.4)])
    rho = steady_state(model)
    # <ad(0) a(tau)> decays at (gamma_a + P + gamma_phi)/2 for a two-level
    # truncated mode: the half width is the coherence decay rate.
    width = lindblad.line_halfwidth(model, rho, 'a')
    L = build_liouvillian(model)
    s = lindblad.emission_spectrum(model, rho, 'a', [0.0, width], L)
    assert abs(s[1] / s[0] - 0.5) < 1e-8
    assert s[0] > 0


def test_auto_truncate_grows_until_top_level_is_empty():
    def build(truncation):
        return condensate(truncation['a'], truncation['b'], P_b=1.0, P_ba=2.0)
    with log_capture('twophoton.core.lindblad') as log:
        model, rho = lindblad.auto_truncate(build, {'a': 2, 'b': 2}, tolerance=1e-4)
    assert rho.populations('a')[-1] < 1e-4
    assert rho.populations('b')[-1] < 1e-4
    log.assertLogged('growing')
    with assert_raises(TruncationError):
        lindblad.auto_truncate(build, {'a': 1, 'b': 1}, tolerance=1e-12, max_rounds=1)
