import argparse
import json
import os
from collections import namedtuple

import numpy as np

from .. import __version__
from ..core.common import ConfigError, HBAR_UEV_PS
from ..core.hasher import Hasher, prune_nohash
from ..core.sensors import SpectrumGrid, CorrelationTrace, LAMBDA_START, LAMBDA_LEVELS, \
    RICHARDSON_TOLERANCE, lambda_ladder
from ..core.lindblad import TRUNCATION_TOLERANCE
from ..core.analytic import DEFAULT_EPSILON
from ..core.condensate import DEFAULT_ORDER

DEFAULT_GRID = {'omega_min': -3.0, 'omega_max': 3.0, 'points': 41}

DEFAULT_NUMERICS = {
    'truncation_tolerance': TRUNCATION_TOLERANCE,
    'lambda_start': LAMBDA_START,
    'lambda_levels': LAMBDA_LEVELS,
    'richardson_tolerance': RICHARDSON_TOLERANCE,
    'epsilon': DEFAULT_EPSILON,
    'moment_order': DEFAULT_ORDER,
}


class Units(namedtuple('Units', 'mode gamma_a_ueV')):
    """
    Conversion between the units of input/output and the internal units
    of ``gamma_a``

    In ``'physical'`` mode energies are in ueV and delays in ps:

    >>> u = Units('physical', 2.0)
    >>> u.to_natural_energy(1.0), u.from_natural_energy(3.0)
    (0.5, 6.0)
    >>> Units('natural', None).from_natural_time(4.0)
    4.0
    """
    __slots__ = ()

    def __new__(cls, mode='natural', gamma_a_ueV=None):
        if mode not in ('natural', 'physical'):
            raise ConfigError('units must be natural or physical, got %r' % mode)
        if mode == 'physical':
            if gamma_a_ueV is None or not gamma_a_ueV > 0:
                raise ConfigError('physical units need a positive gamma_a in ueV, got %r'
                                  % gamma_a_ueV)
            gamma_a_ueV = float(gamma_a_ueV)
        return super(Units, cls).__new__(cls, mode, gamma_a_ueV)

    @property
    def physical(self):
        return self.mode == 'physical'

    @property
    def energy_scale(self):
        return self.gamma_a_ueV if self.physical else 1.0

    @property
    def time_scale(self):
        """ps per ``1/gamma_a``"""
        return HBAR_UEV_PS / self.gamma_a_ueV if self.physical else 1.0

    def to_natural_energy(self, x):
        return x / self.energy_scale

    def from_natural_energy(self, x):
        return x * self.energy_scale

    def to_natural_time(self, t):
        return t / self.time_scale

    def from_natural_time(self, t):
        return t * self.time_scale

    def labels(self):
        return {'energy': 'ueV', 'time': 'ps'} if self.physical else \
            {'energy': 'gamma_a', 'time': '1/gamma_a'}

    def to_tree(self):
        tree = {'units': self.mode}
        if self.physical:
            tree['gamma_a_ueV'] = self.gamma_a_ueV
        return tree

    def grid_out(self, grid):
        """`grid` with axes and width in output units"""
        s = self.energy_scale
        return SpectrumGrid(grid.omega1_axis * s, grid.omega2_axis * s, grid.values, grid.Gamma * s,
                            tau=self.from_natural_time(grid.tau), metadata=grid.metadata,
                            errors=grid.errors)

    def trace_out(self, trace):
        return CorrelationTrace(self.from_natural_time(trace.taus), trace.values,
                                metadata=trace.metadata, errors=trace.errors)


def units_of(ctx, args):
    config = ctx.get_config()
    mode = args.units or config.units
    gamma = args.gamma_a_ueV if args.gamma_a_ueV is not None else config.gamma_a_ueV
    return Units(mode, gamma)


def settings(ctx, args, block, names):
    """Values of `names` from the command line, else the config block, else ``None``"""
    section = ctx.get_config().section(block)
    result = {}
    for name in names:
        value = getattr(args, name, None)
        result[name] = section.get(name) if value is None else value
    return result


def with_defaults(values, defaults):
    result = dict(defaults)
    result.update((k, v) for k, v in values.items() if v is not None)
    return result


def add_grid_arguments(ap):
    ap.add_argument('--omega-min', type=float, dest='omega_min',
                    help='lowest filter frequency (default: -3 gamma_a)')
    ap.add_argument('--omega-max', type=float, dest='omega_max',
                    help='highest filter frequency (default: 3 gamma_a)')
    ap.add_argument('--points', type=int, help='points per axis (default: 41)')


def grid_axis(ctx, args, units):
    """The filter frequency axis in units of gamma_a"""
    config = ctx.get_config().grid
    grid = dict(DEFAULT_GRID)
    for key in ('omega_min', 'omega_max'):
        if key in config:
            grid[key] = units.to_natural_energy(config[key])
        if getattr(args, key, None) is not None:
            grid[key] = units.to_natural_energy(getattr(args, key))
    if 'points' in config:
        grid['points'] = config['points']
    if getattr(args, 'points', None) is not None:
        grid['points'] = args.points
    if grid['points'] < 1 or not grid['omega_min'] < grid['omega_max'] and grid['points'] > 1:
        raise ConfigError('empty frequency grid %r' % (grid,))
    return np.linspace(grid['omega_min'], grid['omega_max'], grid['points'])


def numerics(ctx):
    values = with_defaults(ctx.get_config().numerics, DEFAULT_NUMERICS)
    values['lambdas'] = lambda_ladder(values['lambda_start'], values['lambda_levels'])
    return values


def seed_of(ctx, args):
    return args.seed if args.seed is not None else ctx.get_config().seed


def threads_of(ctx, args):
    return args.threads if args.threads is not None else ctx.get_config().threads


def output_filename(ctx, args, default):
    if args.output is not None:
        return args.output
    return ctx.get_config().output or default


def region_filename(filename, region):
    """
    >>> region_filename('out/g2tau.csv', 2)
    'out/g2tau-region2.csv'
    """
    base, ext = os.path.splitext(filename)
    return '%s-region%d%s' % (base, region, ext)


def run_id(header):
    """Digest of a header, leaving out its ``nohash_`` fields"""
    doc = json.loads(json.dumps(header, sort_keys=True, default=lambda x: np.asarray(x).tolist()))
    return Hasher(prune_nohash(doc)).format_digest()


def provenance_header(command, parameters, seed=None, units=None, model_id=None, threads=None):
    """
    The header of an output file

    `threads` is kept as ``nohash_threads``: it does not change the
    result, so runs that differ only in it share a ``run_id``.
    """
    header = {'version': __version__, 'command': command, 'parameters': parameters}
    if seed is not None:
        header['seed'] = seed
    header.update(units.to_tree() if units is not None else {'units': 'natural'})
    if model_id is not None:
        header['model_id'] = model_id
    if threads is not None:
        header['nohash_threads'] = threads
    header['run_id'] = run_id(header)
    return header


def float_pair(string):
    """Parse ``'lo,hi'`` into a pair of floats

    >>> float_pair('-10.6,10.6')
    (-10.6, 10.6)
    """
    try:
        lo, hi = [float(x) for x in string.split(',')]
        return lo, hi
    except ValueError:
        raise argparse.ArgumentTypeError('expected "low,high", got %r' % string)


def float_list(string):
    try:
        return [float(x) for x in string.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma separated numbers, got %r' % string)


def state_spec(string):
    """Parse an initial state ``kind:value``

    >>> state_spec('fock:2')
    ('fock', 2.0)
    """
    kind, sep, value = string.partition(':')
    if kind not in ('thermal', 'coherent', 'fock', 'mixture') or not sep:
        raise argparse.ArgumentTypeError('expected thermal:N, coherent:N, fock:N or mixture:N, '
                                         'got %r' % string)
    try:
        return kind, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError('state value %r is not a number' % value)
