import contextlib
import io
import os

import numpy as np

from .. import command_line_entry_point, help_on_exceptions
from ..main import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_STATISTICS
from ...core.analytic import DecayDephaseParams, FilterParams, form_factor_grid
from ...core.test.utils import temp_working_dir_fixture, dump, cat
from ...formats.grid_file import read_grid_file, read_trace_file
from ...formats.frame_file import write_frame_file
from ...stream.detector import DetectorConfig, FrameSet
from ...util.logger_fixtures import log_capture

SMALL_GRID = ['--omega-min', '-1', '--omega-max', '1', '--points', '3']
FULL = '-228.35,228.35'


def twophoton(*args):
    """Run the command line in-process; returns ``(exit code, log, stdout)``"""
    out = io.StringIO()
    env = dict(os.environ)
    env.pop('TWOPHOTON_CONFIG', None)
    with log_capture() as log:
        with contextlib.redirect_stdout(out):
            retcode = help_on_exceptions(command_line_entry_point, ['twophoton'] + list(args),
                                         env, secondary=True)
    return retcode, log, out.getvalue()


def exit_status(*args):
    try:
        twophoton(*args)
    except SystemExit as e:
        return e.code
    assert False, 'expected the argument parser to exit'


@temp_working_dir_fixture
def test_formfactor_without_dephasing(d):
    retcode, log, out = twophoton('formfactor', '--gamma-phi', '0', '-o', 'ff.csv')
    assert retcode == 0
    log.assertLogged('wrote 41 x 41 grid to ff.csv')
    grid, header = read_grid_file('ff.csv')
    assert header['command'] == 'formfactor' and header['units'] == 'natural'
    assert header['parameters'] == {'gamma_phi': 0.0, 'Gamma': 0.5}
    np.testing.assert_allclose(grid.values, 1.0, atol=1e-12)


@temp_working_dir_fixture
def test_formfactor_grid_is_symmetric(d):
    assert twophoton('formfactor', '--gamma-phi', '0.8', '--points', '7', '-o', 'ff.csv')[0] == 0
    grid, header = read_grid_file('ff.csv')
    np.testing.assert_allclose(grid.values, grid.values.T, rtol=1e-13)
    axis = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(grid.values, form_factor_grid(
        FilterParams(0, 0, 0.5), DecayDephaseParams(1.0, 0.8), axis, axis), rtol=1e-14)


@temp_working_dir_fixture
def test_physical_units_match_natural_units(d):
    assert twophoton('formfactor', '--gamma-phi', '1', '--Gamma', '0.5', '-o', 'natural.csv',
                     *SMALL_GRID)[0] == 0
    assert twophoton('--units', 'physical', '--gamma-a-ueV', '2', 'formfactor',
                     '--gamma-phi', '2', '--Gamma', '1', '--omega-min', '-2', '--omega-max', '2',
                     '--points', '3', '-o', 'physical.csv')[0] == 0
    natural, _ = read_grid_file('natural.csv')
    physical, header = read_grid_file('physical.csv')
    assert header['units'] == 'physical' and header['gamma_a_ueV'] == 2.0
    np.testing.assert_allclose(physical.omega1_axis, 2 * natural.omega1_axis, rtol=1e-14)
    assert physical.Gamma == 1.0
    np.testing.assert_allclose(physical.values, natural.values, rtol=1e-12)


@temp_working_dir_fixture
def test_spont2ps_of_two_photons(d):
    retcode, log, out = twophoton('spont2ps', '--state', 'fock:2', '-o', 'fock2.csv', *SMALL_GRID)
    assert retcode == 0
    log.assertLogged('initial fock state: g2_0 = 0.(5|4999)')
    grid, header = read_grid_file('fock2.csv')
    assert abs(header['g2_0'] - 0.5) < 1e-12
    assert header['parameters']['state'] == {'kind': 'fock', 'value': 2.0}
    axis = np.linspace(-1, 1, 3)
    expected = 0.5 * form_factor_grid(FilterParams(0, 0, 0.5), DecayDephaseParams(1.0, 1.0),
                                      axis, axis)
    np.testing.assert_allclose(grid.values, expected, rtol=1e-6)


@temp_working_dir_fixture
def test_config_file(d):
    dump('run.yaml', """\
        grid: {omega_min: -1, omega_max: 1, points: 3}
        output: from-config.csv
        analytic:
          gamma_phi: 0.0
    """)
    assert twophoton('--config-file', 'run.yaml', 'formfactor')[0] == 0
    grid, header = read_grid_file('from-config.csv')
    assert header['parameters']['gamma_phi'] == 0.0
    assert len(grid.omega1_axis) == 3


@temp_working_dir_fixture
def test_bad_config_exits_with_2(d):
    dump('run.yaml', """\
        seed: 1
        analytic: {gamma_phi: 1.0, rate: 2.0}
    """)
    retcode, log, out = twophoton('--config-file', 'run.yaml', 'formfactor')
    assert retcode == EXIT_CONFIG
    log.assertLogged('^CRITICAL:run.yaml, line 2: Additional properties')
    retcode, log, out = twophoton('correlate', 'missing.txt', '--window1=' + FULL,
                                  '--window2=' + FULL, '--coincidence')
    assert retcode == EXIT_CONFIG
    log.assertLogged('^CRITICAL:.*missing.txt')


@temp_working_dir_fixture
def test_numerical_failure_exits_with_3(d):
    dump('kerr.yaml', """\
        modes: [a]
        truncation: [3]
        hamiltonian: [{operator: ad*ad*a*a, coefficient: 1.0}]
        collapse: [{operator: a, rate: 1.0}]
    """)
    retcode, log, out = twophoton('spont2ps', '--model', 'kerr.yaml', *SMALL_GRID)
    assert retcode == EXIT_NUMERICAL
    log.assertLogged('^CRITICAL:MomentClosureError')
    assert not os.path.exists('spont2ps.csv')


@temp_working_dir_fixture
def test_empty_window_exits_with_4(d):
    fs = FrameSet(DetectorConfig(), 4, [0, 0, 1, 3], [1.6, 4.8, 1.6, 8.0], [0.0] * 4)
    write_frame_file('frames.txt', fs)
    retcode, log, out = twophoton('correlate', 'frames.txt', '--window1=-5,5',
                                  '--window2=100,110', '--coincidence', '--blocks', '2')
    assert retcode == EXIT_STATISTICS
    log.assertLogged('^CRITICAL:empty windows .*counts')
    assert out == ''


def test_argument_errors():
    assert exit_status('--threads', '0', 'formfactor') == 2
    assert exit_status('g2tau', '--tau-points', '1') == 2
    assert exit_status('spont2ps', '--state', 'squeezed:1') == 2
    assert exit_status('correlate', 'frames.txt', '--window1=1,2') == 2
    assert exit_status('correlate', 'frames.txt', '--coincidence') == 2


@temp_working_dir_fixture
def test_stream_and_correlate(d):
    stream = ['stream', '--n0', '2', '--frames', '60']
    assert twophoton('--seed', '3', *(stream + ['-o', 'one.txt']))[0] == 0
    assert twophoton('--seed', '3', '--threads', '2', *(stream + ['-o', 'two.txt']))[0] == 0
    assert cat('one.txt') == cat('two.txt')
    assert '# seed: 3' in cat('one.txt').splitlines()

    resampling = ['--blocks', '5', '--resamples', '10']
    retcode, log, out = twophoton('correlate', 'one.txt', '--window1=' + FULL,
                                  '--window2=' + FULL, '--coincidence', '--tau-window', 'inf',
                                  *resampling)
    assert retcode == 0
    assert out.startswith('g2 = ') and ' +- ' in out
    assert np.isfinite(float(out.split()[2]))

    assert twophoton('correlate', 'one.txt', '--scan', '455.8', '--tau-window', 'inf',
                     '-o', 'scan.csv', *resampling)[0] == 0
    grid, header = read_grid_file('scan.csv')
    assert grid.values.shape == (1, 1) and grid.errors is not None
    assert header['parameters']['tau_window'] == float('inf')
    assert header['seed'] == 0
    assert header['nohash_threads'] == 1
    assert twophoton('--threads', '2', 'correlate', 'one.txt', '--scan', '455.8', '--tau-window',
                     'inf', '-o', 'scan2.csv', *resampling)[0] == 0
    grid2, header2 = read_grid_file('scan2.csv')
    assert header2['nohash_threads'] == 2
    assert header2['run_id'] == header['run_id']
    np.testing.assert_array_equal(grid2.values, grid.values)

    assert twophoton('correlate', 'one.txt', '--window1=' + FULL, '--window2=' + FULL,
                     '-o', 'g2tau.csv', *resampling)[0] == 0
    trace, header = read_trace_file('g2tau.csv')
    assert len(trace.taus) == 40 and trace.taus[0] == 1.6
    assert header['parameters']['frames_id'] == \
        read_grid_file('scan.csv')[1]['parameters']['frames_id']


def test_help():
    retcode, log, out = twophoton('help', 'spont2ps')
    assert retcode == 0
    assert 'fock:2' in out
    retcode, log, out = twophoton('help')
    for command in ('formfactor', 'spont2ps', 'cond2ps', 'g2tau', 'stream', 'correlate'):
        assert command in out


@temp_working_dir_fixture
def test_log_file(d):
    assert twophoton('--log-file', 'run.log', 'formfactor', '-o', 'ff.csv', *SMALL_GRID)[0] == 0
    assert 'wrote 3 x 3 grid to ff.csv' in cat('run.log')
