"""
Sub-commands computing two-photon spectra and correlation traces from
models: ``formfactor``, ``spont2ps``, ``cond2ps`` and ``g2tau``.
"""

import time

import numpy as np

from .main import register_subcommand
from .utils import (add_grid_arguments, grid_axis, units_of, settings, numerics, threads_of,
                    output_filename, region_filename, provenance_header, state_spec)
from ..core import lindblad, sensors
from ..core.analytic import (DecayDephaseParams, FilterParams, form_factor_grid,
                             decay_dephasing_model)
from ..core.condensate import (CondensateParams, steady_state_oracle, condensate_2ps,
                               region_traces, region_probes)
from ..core.fock import prepare_state
from ..core.sensors import SpectrumGrid
from ..formats.grid_file import write_grid_file, write_trace_file
from ..formats.model_file import load_model_file

# natural units
ANALYTIC_DEFAULTS = {'gamma_phi': 1.0, 'Gamma': 0.5}
SPONTANEOUS_DEFAULTS = {'gamma_phi': 1.0, 'Gamma': 0.5, 'mode': 'a', 'weight': 0.5}
CONDENSATE_DEFAULTS = {'gamma_a': 1.0, 'gamma_b': 1.0, 'P_b': 1.0, 'P_ba': 10.0, 'Gamma': 0.5,
                       'tau_max': 20.0, 'tau_points': 41}

RATES = ('gamma_phi', 'Gamma', 'gamma_a', 'gamma_b', 'P_b', 'P_ba')
TIMES = ('tau_max',)


def resolve_parameters(ctx, args, block, defaults):
    """``(units, given, natural)``: parameters in the units of the run and in units of gamma_a

    Command-line values take precedence over the config block, which
    takes precedence over `defaults` (given in units of gamma_a).
    """
    units = units_of(ctx, args)
    given = {}
    for key, value in defaults.items():
        if key in RATES:
            value = units.from_natural_energy(value)
        elif key in TIMES:
            value = units.from_natural_time(value)
        given[key] = value
    given.update((k, v) for k, v in settings(ctx, args, block, list(defaults)).items()
                 if v is not None)
    natural = {}
    for key, value in given.items():
        if key in RATES:
            value = units.to_natural_energy(value)
        elif key in TIMES:
            value = units.to_natural_time(value)
        natural[key] = value
    return units, given, natural


def _write_grid(ctx, filename, grid, header, started):
    write_grid_file(filename, grid, header)
    ctx.logger.info('wrote %d x %d grid to %s in %.1f s', len(grid.omega1_axis),
                    len(grid.omega2_axis), filename, time.time() - started)


def _add_filter_arguments(ap):
    ap.add_argument('--Gamma', type=float, default=None,
                    help='Filter linewidth (default: gamma_a/2)')
    add_grid_arguments(ap)


def _add_condensate_arguments(ap):
    ap.add_argument('--gamma-b', type=float, default=None, dest='gamma_b',
                    help='Reservoir decay rate (default: gamma_a)')
    ap.add_argument('--P-b', type=float, default=None, dest='P_b',
                    help='Reservoir pumping rate (default: gamma_a)')
    ap.add_argument('--P-ba', type=float, default=None, dest='P_ba',
                    help='Reservoir to condensate scattering rate (default: 10 gamma_a)')
    ap.add_argument('--Gamma', type=float, default=None,
                    help='Filter linewidth (default: gamma_a/2)')


def _condensate_params(natural):
    return CondensateParams(natural['gamma_a'], natural['gamma_b'], natural['P_b'], natural['P_ba'])


@register_subcommand
class FormFactor(object):
    """
    Boson form factor of a decaying, dephasing mode on a frequency grid

    The form factor multiplies the unfiltered ``g2`` of any initial state
    to give the filtered two-photon spectrum of its spontaneous
    emission. Example::

        $ twophoton formfactor --gamma-phi 1 --Gamma 0.5 -o formfactor.csv

    """
    command = 'formfactor'

    @staticmethod
    def setup(ap):
        ap.add_argument('--gamma-phi', type=float, default=None, dest='gamma_phi',
                        help='Pure dephasing rate (default: gamma_a)')
        _add_filter_arguments(ap)

    @staticmethod
    def run(ctx, args):
        started = time.time()
        units, given, natural = resolve_parameters(ctx, args, 'analytic', ANALYTIC_DEFAULTS)
        axis = grid_axis(ctx, args, units)
        p = DecayDephaseParams(1.0, natural['gamma_phi'])
        f = FilterParams(axis[0], axis[0], natural['Gamma'])
        model_id = decay_dephasing_model(p).model_id()
        grid = SpectrumGrid(axis, axis, form_factor_grid(f, p, axis, axis), f.Gamma,
                            metadata={'model_id': model_id})
        header = provenance_header('formfactor', given, units=units, model_id=model_id,
                                   threads=threads_of(ctx, args))
        _write_grid(ctx, output_filename(ctx, args, 'formfactor.csv'), units.grid_out(grid),
                    header, started)


@register_subcommand
class Spont2ps(object):
    """
    Filtered two-photon spectrum of spontaneous emission from an initial state

    The emitter decays and dephases (or follows the model given with
    ``--model``); its initial state is ``thermal:N``, ``coherent:N``,
    ``mixture:N`` (with ``--weight``) or ``fock:N``. The spectrum is
    computed with the sensor chain and extrapolated in the
    regularization rate. The unfiltered ``g2`` of the state is written
    to the header. Example::

        $ twophoton spont2ps --state fock:2 -o fock2.csv

    """
    command = 'spont2ps'

    @staticmethod
    def setup(ap):
        ap.add_argument('--state', type=state_spec, default=None,
                        help='Initial state, e.g. thermal:1 or fock:2 (default: thermal:1)')
        ap.add_argument('--weight', type=float, default=None,
                        help='Coherent fraction of a mixture state (default: 0.5)')
        ap.add_argument('--gamma-phi', type=float, default=None, dest='gamma_phi',
                        help='Pure dephasing rate (default: gamma_a)')
        ap.add_argument('--model', default=None,
                        help='Model file replacing the decaying, dephasing mode')
        ap.add_argument('--mode', default=None, help='Emitting mode (default: a)')
        _add_filter_arguments(ap)

    @staticmethod
    def run(ctx, args):
        started = time.time()
        units, given, natural = resolve_parameters(ctx, args, 'spontaneous', SPONTANEOUS_DEFAULTS)
        mode = natural['mode']
        state = args.state
        if state is None:
            block = ctx.get_config().section('spontaneous').get('state', {})
            state = (block.get('kind', 'thermal'), block.get('value', 1.0))
            if args.weight is None:
                natural['weight'] = block.get('weight', natural['weight'])
        kind, value = state
        rho0 = prepare_state(kind, value, mode, weight=natural['weight'])
        model_file = args.model or ctx.get_config().section('spontaneous').get('model')
        if model_file is not None:
            model = load_model_file(model_file)
        else:
            model = decay_dephasing_model(DecayDephaseParams(1.0, natural['gamma_phi']), mode=mode)
        g2_0 = lindblad.g2_zero(rho0, mode)
        system = sensors.build_moment_system(model, mode, rho0=rho0)
        num = numerics(ctx)
        axis = grid_axis(ctx, args, units)
        f = FilterParams(axis[0], axis[0], natural['Gamma'])
        grid = sensors.spontaneous_grid(system, f, axis, axis, threads_of(ctx, args),
                                        num['lambdas'], num['richardson_tolerance'])
        ctx.logger.info('initial %s state: g2_0 = %r', kind, g2_0)
        parameters = dict(given, state={'kind': kind, 'value': value})
        if model_file is not None:
            parameters['model'] = model_file
        header = provenance_header('spont2ps', parameters, units=units, model_id=model.model_id(),
                                   threads=threads_of(ctx, args))
        header['g2_0'] = g2_0
        _write_grid(ctx, output_filename(ctx, args, 'spont2ps.csv'), units.grid_out(grid),
                    header, started)


def _condensate_setup(ctx, args, natural):
    num = numerics(ctx)
    p = _condensate_params(natural)
    model, rho = steady_state_oracle(p, tolerance=num['truncation_tolerance'])
    g2_0 = lindblad.g2_zero(rho, 'a')
    ctx.logger.info('condensate steady state at truncation %r: n = %.4g, g2_0 = %.6g',
                    list(model.space.truncation), rho.mean_occupation('a'), g2_0)
    return p, model, rho, g2_0, num


@register_subcommand
class Cond2ps(object):
    """
    Stationary two-photon spectrum of the polariton condensate

    The condensate is pumped through a reservoir; its steady state is
    found at a Fock truncation grown until the top levels are empty,
    and the spectrum is the correlation of two weakly coupled sensors.
    Example::

        $ twophoton --threads 4 cond2ps --P-b 1 --P-ba 10 -o cond2ps.csv

    """
    command = 'cond2ps'

    @staticmethod
    def setup(ap):
        _add_condensate_arguments(ap)
        add_grid_arguments(ap)

    @staticmethod
    def run(ctx, args):
        started = time.time()
        units, given, natural = resolve_parameters(ctx, args, 'condensate', CONDENSATE_DEFAULTS)
        p, model, rho, g2_0, num = _condensate_setup(ctx, args, natural)
        axis = grid_axis(ctx, args, units)
        grid = condensate_2ps(p, natural['Gamma'], axis, axis, threads_of(ctx, args),
                              num['epsilon'], model=model)
        for key in ('tau_max', 'tau_points'):
            given.pop(key)
        header = provenance_header('cond2ps', given, units=units, model_id=model.model_id(),
                                   threads=threads_of(ctx, args))
        header['g2_0'] = g2_0
        header['probes'] = [[probe.region, units.from_natural_energy(probe.omega1),
                             units.from_natural_energy(probe.omega2)]
                            for probe in region_probes(model, rho)]
        _write_grid(ctx, output_filename(ctx, args, 'cond2ps.csv'), units.grid_out(grid),
                    header, started)


@register_subcommand
class G2tau(object):
    """
    Filtered ``g2(tau)`` of the condensate at the three probe regions

    The probes sit on the diagonal, on an axis and on the antidiagonal
    of the spectrum, at the half width of the emission line. One trace
    file is written per probe, named after the output file with
    ``-region1``, ``-region2`` and ``-region3`` appended. Example::

        $ twophoton g2tau --tau-max 20 -o g2tau.csv

    """
    command = 'g2tau'

    @staticmethod
    def setup(ap):
        _add_condensate_arguments(ap)
        ap.add_argument('--tau-max', type=float, default=None, dest='tau_max',
                        help='Longest delay (default: 20/gamma_a)')
        ap.add_argument('--tau-points', type=int, default=None, dest='tau_points',
                        help='Number of delays from 0 (default: 41)')

    @staticmethod
    def run(ctx, args):
        started = time.time()
        units, given, natural = resolve_parameters(ctx, args, 'condensate', CONDENSATE_DEFAULTS)
        if natural['tau_points'] < 2:
            ctx.error('--tau-points must be at least 2')
        p, model, rho, g2_0, num = _condensate_setup(ctx, args, natural)
        taus = np.linspace(0.0, natural['tau_max'], natural['tau_points'])
        filename = output_filename(ctx, args, 'g2tau.csv')
        for probe, trace in region_traces(p, taus, natural['Gamma'], num['epsilon'], model=model):
            trace.metadata.update({'omega1': units.from_natural_energy(probe.omega1),
                                   'omega2': units.from_natural_energy(probe.omega2)})
            header = provenance_header('g2tau', given, units=units, model_id=model.model_id(),
                                       threads=threads_of(ctx, args))
            header['g2_0'] = g2_0
            name = region_filename(filename, probe.region)
            write_trace_file(name, units.trace_out(trace), header)
            ctx.logger.info('region %d: g2(0) = %.4f, g2(%g) = %.4f; wrote %s', probe.region,
                            trace.values[0], given['tau_max'], trace.values[-1], name)
        ctx.logger.info('done in %.1f s', time.time() - started)
