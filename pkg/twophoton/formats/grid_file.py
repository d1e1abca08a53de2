"""
Grid and trace files

Two-photon spectra and ``g2(tau)`` traces are written as plain text that
any plotting tool reads. A block of ``# key: value`` header lines
(values are JSON) is followed by a column line and one comma separated
row per point::

    # format: "grid"
    # command: "formfactor"
    # Gamma: 0.5
    # tau: 0.0
    omega1,omega2,value
    -3.0,-3.0,1.0210986...

Traces have ``tau,value`` rows. Estimated values add an ``error``
column. Numbers are written with ``repr`` so that they read back
exactly, and files are replaced atomically.
"""

import json

import numpy as np

from ..core.fileutils import atomic_write
from ..core.sensors import SpectrumGrid, CorrelationTrace
from .marked_yaml import ValidationError, text_mark

GRID_COLUMNS = ['omega1', 'omega2', 'value']
TRACE_COLUMNS = ['tau', 'value']


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    elif isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError('%r is not JSON serializable' % (x,))


def format_header(header):
    """
    >>> print(format_header({'format': 'trace', 'seed': 3}), end='')
    # format: "trace"
    # seed: 3
    """
    lines = []
    for key, value in header.items():
        if ':' in key or '\n' in key:
            raise ValueError('illegal header key %r' % key)
        lines.append('# %s: %s\n' % (key, json.dumps(value, sort_keys=True, default=_jsonable)))
    return ''.join(lines)


def _number(x):
    return repr(float(x))


def _write(filename, header, columns, rows):
    with atomic_write(filename) as f:
        f.write(format_header(header))
        f.write(','.join(columns) + '\n')
        for row in rows:
            f.write(','.join(_number(x) for x in row) + '\n')


def _read(filename, kind):
    """``(header, columns, rows)`` of a grid or trace file"""
    header = {}
    columns = None
    rows = []
    with open(filename) as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip('\n')
            mark = text_mark(filename, lineno)
            if columns is None and line.startswith('#'):
                key, sep, value = line[1:].strip().partition(':')
                if not sep:
                    raise ValidationError(mark, 'header line without "key: value"')
                try:
                    header[key.strip()] = json.loads(value)
                except ValueError:
                    raise ValidationError(mark, 'header value of %r is not JSON' % key.strip())
            elif columns is None:
                columns = line.split(',')
            elif line:
                fields = line.split(',')
                if len(fields) != len(columns):
                    raise ValidationError(mark, 'expected %d columns, got %d'
                                          % (len(columns), len(fields)))
                try:
                    rows.append([float(x) for x in fields])
                except ValueError:
                    raise ValidationError(mark, 'row is not numeric: %r' % line)
    mark = text_mark(filename, 1)
    if header.get('format') != kind:
        raise ValidationError(mark, 'not a %s file (format %r)' % (kind, header.get('format')))
    if columns is None:
        raise ValidationError(mark, 'no column line')
    return header, columns, np.array(rows, dtype=float).reshape(len(rows), len(columns))


def write_grid_file(filename, grid, header=None):
    """Write a :class:`SpectrumGrid`; `header` entries come before the grid's own"""
    full = {'format': 'grid'}
    full.update(header or {})
    full.update({'Gamma': grid.Gamma, 'tau': grid.tau, 'metadata': grid.metadata})
    columns = GRID_COLUMNS + (['error'] if grid.errors is not None else [])
    w1, w2 = np.meshgrid(grid.omega1_axis, grid.omega2_axis, indexing='ij')
    parts = [w1.ravel(), w2.ravel(), grid.values.ravel()]
    if grid.errors is not None:
        parts.append(grid.errors.ravel())
    _write(filename, full, columns, zip(*parts))


def read_grid_file(filename):
    """``(grid, header)``; the header has the grid's own entries removed"""
    header, columns, rows = _read(filename, 'grid')
    if columns[:3] != GRID_COLUMNS:
        raise ValidationError(text_mark(filename, 1), 'grid columns must start with %s'
                              % ','.join(GRID_COLUMNS))
    if 'Gamma' not in header:
        raise ValidationError(text_mark(filename, 1), 'grid header has no Gamma')
    rows = rows[np.lexsort((rows[:, 1], rows[:, 0]))]
    axis1 = np.unique(rows[:, 0])
    axis2 = np.unique(rows[:, 1])
    if len(rows) != len(axis1) * len(axis2):
        raise ValidationError(text_mark(filename, 1), '%d rows do not form a %d x %d grid'
                              % (len(rows), len(axis1), len(axis2)))
    shape = (len(axis1), len(axis2))
    errors = rows[:, 3].reshape(shape) if 'error' in columns else None
    grid = SpectrumGrid(axis1, axis2, rows[:, 2].reshape(shape), header.pop('Gamma'),
                        tau=header.pop('tau', 0.0), metadata=header.pop('metadata', {}),
                        errors=errors)
    return grid, header


def write_trace_file(filename, trace, header=None):
    full = {'format': 'trace'}
    full.update(header or {})
    full['metadata'] = trace.metadata
    columns = TRACE_COLUMNS + (['error'] if trace.errors is not None else [])
    parts = [trace.taus, trace.values] + ([trace.errors] if trace.errors is not None else [])
    _write(filename, full, columns, zip(*parts))


def read_trace_file(filename):
    header, columns, rows = _read(filename, 'trace')
    if columns[:2] != TRACE_COLUMNS:
        raise ValidationError(text_mark(filename, 1), 'trace columns must start with %s'
                              % ','.join(TRACE_COLUMNS))
    errors = rows[:, 2] if 'error' in columns else None
    trace = CorrelationTrace(rows[:, 0], rows[:, 1], metadata=header.pop('metadata', {}),
                             errors=errors)
    return trace, header
