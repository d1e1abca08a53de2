import numpy as np

from ..grid_file import write_grid_file, read_grid_file, write_trace_file, read_trace_file
from ..marked_yaml import ValidationError
from ...core.sensors import SpectrumGrid, CorrelationTrace
from ...core.test.utils import temp_working_dir_fixture, assert_raises, cat, dump


def _grid(errors=False):
    axis1 = np.linspace(-1.0, 1.0, 3)
    axis2 = np.array([-0.1, 0.3])
    values = np.array([[1.0, 0.1], [1 / 3., 2.0], [np.pi, 1e-17]])
    return SpectrumGrid(axis1, axis2, values, 0.5, tau=0.0, metadata={'model_id': 'abc'},
                        errors=values / 10 if errors else None)


@temp_working_dir_fixture
def test_grid_round_trip(d):
    grid = _grid()
    write_grid_file('grid.csv', grid, {'command': 'formfactor', 'seed': 3})
    lines = cat('grid.csv').splitlines()
    assert lines[0] == '# format: "grid"'
    assert 'omega1,omega2,value' in lines
    assert '-1.0,0.3,0.1' in lines
    assert '0.0,-0.1,%r' % (1 / 3.) in lines
    back, header = read_grid_file('grid.csv')
    assert header == {'format': 'grid', 'command': 'formfactor', 'seed': 3}
    np.testing.assert_array_equal(back.omega1_axis, grid.omega1_axis)
    np.testing.assert_array_equal(back.omega2_axis, grid.omega2_axis)
    np.testing.assert_array_equal(back.values, grid.values)
    assert back.Gamma == 0.5 and back.tau == 0.0
    assert back.metadata == {'model_id': 'abc'}
    assert back.errors is None


@temp_working_dir_fixture
def test_grid_with_errors(d):
    grid = _grid(errors=True)
    write_grid_file('scan.csv', grid)
    assert 'omega1,omega2,value,error' in cat('scan.csv').splitlines()
    back, header = read_grid_file('scan.csv')
    np.testing.assert_array_equal(back.errors, grid.errors)


@temp_working_dir_fixture
def test_trace_round_trip(d):
    trace = CorrelationTrace([0.0, 0.5, 1.5], [2.0, 1.25, 1.0], metadata={'omega1': 0.5},
                             errors=[0.1, 0.05, np.nan])
    write_trace_file('g2tau.csv', trace, {'command': 'g2tau'})
    back, header = read_trace_file('g2tau.csv')
    assert header == {'format': 'trace', 'command': 'g2tau'}
    np.testing.assert_array_equal(back.taus, trace.taus)
    np.testing.assert_array_equal(back.values, trace.values)
    np.testing.assert_array_equal(back.errors, trace.errors)
    assert back.metadata == {'omega1': 0.5}


@temp_working_dir_fixture
def test_bad_rows(d):
    dump('bad.csv', """\
        # format: "trace"
        tau,value
        0.0,1.0
        0.5,x
    """)
    with assert_raises(ValidationError) as r:
        read_trace_file('bad.csv')
    assert str(r.exc_val).startswith('bad.csv, line 4: ')
    dump('short.csv', """\
        # format: "trace"
        tau,value
        0.0
    """)
    with assert_raises(ValidationError) as r:
        read_trace_file('short.csv')
    assert str(r.exc_val) == 'short.csv, line 3: expected 2 columns, got 1'


@temp_working_dir_fixture
def test_wrong_format(d):
    write_trace_file('trace.csv', CorrelationTrace([0.0, 1.0], [1.0, 1.0]))
    with assert_raises(ValidationError) as r:
        read_grid_file('trace.csv')
    assert "not a grid file (format 'trace')" in str(r.exc_val)
    dump('holes.csv', """\
        # format: "grid"
        # Gamma: 0.5
        omega1,omega2,value
        0.0,0.0,1.0
        0.0,1.0,1.0
        1.0,0.0,1.0
    """)
    with assert_raises(ValidationError) as r:
        read_grid_file('holes.csv')
    assert 'do not form a 2 x 2 grid' in str(r.exc_val)
