import numpy as np

from ..common import ConfigError, TruncationError, UndefinedCorrelationError
from ..fock import FockSpace, DensityMatrix
from ..operators import Monomial
from .. import lindblad
from ..lindblad import build_liouvillian, vec, unvec
from .. import condensate, sensors
from ..analytic import FilterParams
from ..condensate import (CondensateParams, MomentTable, moment_rhs, steady_moments,
                          moments_from_state, moment_trajectory, condensate_model,
                          steady_state_oracle)
from ...util.logger_fixtures import log_capture
from .utils import assert_raises, assert_close


def moment_operator(n, m):
    return '*'.join(['ad'] * n + ['a'] * n + ['bd'] * m + ['b'] * m)


def test_params_validation():
    p = CondensateParams()
    assert p == (1.0, 1.0, 1.0, 10.0)
    with assert_raises(ConfigError):
        CondensateParams(gamma_a=-1)
    with assert_raises(ConfigError):
        CondensateParams(P_b=float('nan'))
    # effective reservoir loss 1 - 12 + 10 < 0
    with assert_raises(ConfigError):
        CondensateParams(P_b=12.0)


def test_moment_table_defaults():
    t = MomentTable(3, {(1, 0): 2.0, (0, 0): 5.0, (9, 9): 1.0})
    assert t[0, 0] == 1.0
    assert t[1, 2] == 0.0
    assert (9, 9) not in t
    # factorized beyond the table
    assert t.get((4, 0)) == 16.0
    with assert_raises(UndefinedCorrelationError):
        MomentTable(2).g2_zero()


def test_moment_rhs_low_orders():
    p = CondensateParams(gamma_a=0.7, gamma_b=1.3, P_b=0.4, P_ba=3.0)
    t = MomentTable(3, {(1, 0): 0.8, (0, 1): 0.3, (1, 1): 0.2, (2, 0): 1.1, (0, 2): 0.15})
    rhs = moment_rhs(t, p)
    assert rhs[0, 0] == 0
    assert_close(rhs[1, 0], -0.7 * 0.8 + 3.0 * 0.3 + 3.0 * 0.2, rtol=1e-14)
    assert_close(rhs[0, 1], -(1.3 - 0.4 + 3.0) * 0.3 + 0.4 - 3.0 * 0.2, rtol=1e-14)


def test_moment_rhs_matches_master_equation():
    p = CondensateParams(gamma_a=1.0, gamma_b=0.8, P_b=0.6, P_ba=2.5)
    space = FockSpace(['a', 'b'], [4, 4])
    rng = np.random.default_rng(7)
    occ = space.occupations()
    weights = rng.random(space.dimension) * np.all(occ <= 2, axis=1)
    rho = DensityMatrix(space, np.diag(weights / weights.sum()))
    L = build_liouvillian(condensate_model(p, {'a': 4, 'b': 4}))
    drho = unvec(np.asarray(L @ vec(rho.entries)), space.dimension)

    table = moments_from_state(rho, 6)
    rhs = moment_rhs(table, p)
    for n, m in condensate._entries(4):
        op = Monomial.parse(moment_operator(n, m), space.modes).matrix(space)
        expected = np.trace(op @ drho).real
        assert abs(rhs[n, m] - expected) < 1e-10 * max(1.0, abs(expected)), (n, m)


def test_no_pump_gives_empty_modes():
    table = steady_moments(CondensateParams(P_b=0.0))
    for key, value in table.values.items():
        if key != (0, 0):
            assert value == 0
    with assert_raises(UndefinedCorrelationError):
        table.g2_zero()


def test_occupation_sum_rule():
    # gamma_a N10 + (gamma_b - P_b) N01 = P_b for any closure
    p = CondensateParams(gamma_a=1.0, gamma_b=2.0, P_b=2.0, P_ba=10.0)
    table = steady_moments(p)
    assert_close(table[1, 0], 2.0, rtol=1e-10)
    p = CondensateParams(gamma_a=0.5, gamma_b=1.0, P_b=1.5, P_ba=4.0)
    table = steady_moments(p)
    assert_close(0.5 * table[1, 0] - 0.5 * table[0, 1], 1.5, rtol=1e-10)


def test_steady_moments_escalates_order():
    with log_capture('twophoton.core.condensate') as log:
        table = steady_moments(CondensateParams(), order=4)
    assert table.order > 4
    log.assertLogged('moments at order 6')
    assert table[0, 1] > 0
    assert table.g2_zero() > 1


def test_steady_moments_reports_truncation():
    with assert_raises(TruncationError) as r:
        steady_moments(CondensateParams(), order=2, tolerance=1e-15, max_order=4)
    assert r.exc_val.previous.order == 2
    assert r.exc_val.current.order == 4
    with assert_raises(ConfigError):
        steady_moments(CondensateParams(), order=1)


def test_moments_agree_with_master_equation():
    p = CondensateParams()
    model, rho = steady_state_oracle(p, tolerance=1e-10)
    oracle = moments_from_state(rho, 2)
    table = steady_moments(p, tolerance=1e-9)
    for key in [(1, 0), (0, 1), (2, 0), (1, 1)]:
        assert_close(table[key], oracle[key], rtol=1e-6)
    assert_close(table.g2_zero(), lindblad.g2_zero(rho, 'a'), rtol=1e-6)


def test_g2_decreases_with_pump():
    values = [steady_moments(CondensateParams(P_b=P_b)).g2_zero()
              for P_b in (0.2, 0.5, 1.0, 2.0, 5.0)]
    assert all(v > 1 for v in values)
    assert all(np.diff(values) < 0), values


def test_moment_trajectory_relaxes_to_steady_state():
    p = CondensateParams()
    steady = steady_moments(p)
    start = MomentTable(steady.order)
    trajectory = moment_trajectory(p, start, [0.0, 1.0, 60.0])
    assert trajectory[0][1, 0] == 0
    assert 0 < trajectory[1][1, 0] < steady[1, 0] * 1.5
    assert_close(trajectory[-1][1, 0], steady[1, 0], rtol=1e-6)
    assert_close(trajectory[-1][2, 0], steady[2, 0], rtol=1e-6)
    with assert_raises(ConfigError):
        moment_trajectory(p, start, [1.0, 0.5])


def test_condensate_spectrum_landscape():
    p = CondensateParams()
    model, rho = steady_state_oracle(p)
    probes = condensate.region_probes(model, rho)
    assert [probe.region for probe in probes] == [1, 2, 3]
    omega = probes[0].omega1
    assert omega > 0
    axis = np.array([-omega, 0.0, omega])
    grid = condensate.condensate_2ps(p, axis1=axis, axis2=axis, model=model)
    assert np.all(np.isfinite(grid.values)) and np.all(grid.values > 0)
    assert_close(grid.values, grid.values.T, rtol=1e-6)
    diagonal = grid.value_at(omega, omega)
    antidiagonal = grid.value_at(-omega, omega)
    assert 1.2 <= diagonal <= 2.0, diagonal
    assert 0.5 <= antidiagonal <= 0.95, antidiagonal
    assert grid.metadata['model_id'] == model.model_id()


def test_broad_filters_recover_unfiltered_g2():
    p = CondensateParams()
    model, rho = steady_state_oracle(p)
    ladder = condensate.gamma_ladder(p, gammas=(50.0,), model=model)
    assert ladder[0][0] == 50.0
    assert_close(ladder[0][1], lindblad.g2_zero(rho, 'a'), rtol=2e-2)


def test_steady_sensors_on_default_condensate():
    p = CondensateParams()
    model, rho = steady_state_oracle(p)
    f = FilterParams(0.3, 0.3, 0.5)
    with log_capture('twophoton.core.lindblad') as log:
        g2 = sensors.steady_2ps(model, 'a', f)
    log.assertLogged('normalization rows differ by')
    assert np.isfinite(g2) and g2 > 0


def test_filter_width_ladder_crosses_one():
    p = CondensateParams()
    model, rho = steady_state_oracle(p)
    ladder = condensate.gamma_ladder(p, model=model)
    assert [Gamma for Gamma, value in ladder] == [0.5, 0.75, 1.0, 5.0]
    values = np.array([value for Gamma, value in ladder])
    assert np.all(np.diff(values) > 0), values
    assert values[0] < 1 < values[-1]
    assert_close(values[-1], lindblad.g2_zero(rho, 'a'), rtol=5e-2)


def test_region_traces_relax_monotonically():
    p = CondensateParams()
    model, rho = steady_state_oracle(p)
    taus = np.linspace(0.0, 20.0, 41)
    traces = condensate.region_traces(p, taus, model=model)
    assert [probe.region for probe, trace in traces] == [1, 2, 3]
    diagonal, antidiagonal = traces[0][1], traces[2][1]
    assert diagonal.metadata['region'] == 1
    assert diagonal.values[0] > 1
    assert antidiagonal.values[0] < 1
    assert np.all(np.diff(antidiagonal.values) >= -1e-9), antidiagonal.values
    for probe, trace in traces:
        assert abs(trace.values[-1] - 1) < 1e-3
