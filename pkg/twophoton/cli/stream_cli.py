"""
Sub-commands simulating camera frames and correlating their clicks:
``stream`` and ``correlate``. Times are in ps and energies in ueV
whatever the ``--units``.
"""

import time

import numpy as np

from .main import register_subcommand
from .utils import (settings, seed_of, threads_of, output_filename, provenance_header,
                    float_pair, float_list)
from ..core.hasher import Hasher
from ..stream.detector import DetectorConfig, EmitterConfig, EMITTER_KINDS
from ..stream.simulate import simulate_frames
from ..stream.correlate import (correlate_clicks, scan_2ps, window_g2, DEFAULT_BLOCKS,
                                DEFAULT_RESAMPLES)
from ..formats.frame_file import write_frame_file, read_frame_file
from ..formats.grid_file import write_grid_file, write_trace_file

DEFAULT_FRAMES = 1000
DEFAULT_TAU_BINS = 40


def frames_id(frames):
    """Digest of the clicks of a frame set"""
    h = Hasher([frames.n_frames, frames.frame_index, frames.times, frames.energies])
    return h.format_digest()


def _stream_section(ctx, name):
    return dict(ctx.get_config().section('stream').get(name, {}))


@register_subcommand
class Stream(object):
    """
    Simulate camera frames of a decaying emitter with a diffusing phase

    Every frame draws a new field amplitude and phase, filters it with
    one Lorentzian per energy pixel and draws Poisson clicks. The frame
    file depends only on the parameters and ``--seed``, not on
    ``--threads``. Example::

        $ twophoton --seed 7 stream --kind decaying-coherent --n0 1.69 --frames 10000 -o frames.txt

    """
    command = 'stream'

    @staticmethod
    def setup(ap):
        ap.add_argument('--kind', choices=EMITTER_KINDS, default=None,
                        help='Emitter field statistics (default: decaying-coherent)')
        ap.add_argument('--n0', type=float, default=None,
                        help='Mean photons emitted per frame (default: 1.69)')
        ap.add_argument('--gamma-a', type=float, default=None, dest='gamma_a',
                        help='Decay rate in 1/ps (default: 0.1)')
        ap.add_argument('--gamma-phi', type=float, default=None, dest='gamma_phi',
                        help='Dephasing rate in 1/ps (default: 0.1)')
        ap.add_argument('--weight', type=float, default=None,
                        help='Coherent weight of mixture emitters (default: 0.5)')
        ap.add_argument('--frames', type=int, default=None,
                        help='Number of frames (default: %d)' % DEFAULT_FRAMES)
        ap.add_argument('--time-resolution', type=float, default=None, dest='time_resolution',
                        help='Detector time bin in ps (default: 3.2)')
        ap.add_argument('--energy-resolution', type=float, default=None,
                        dest='energy_resolution',
                        help='Detector energy resolution in ueV (default: 70)')

    @staticmethod
    def run(ctx, args):
        started = time.time()
        emitter_values = _stream_section(ctx, 'emitter')
        emitter_values.update((k, v) for k, v in [
            ('kind', args.kind), ('n0', args.n0), ('gamma_a', args.gamma_a),
            ('gamma_phi', args.gamma_phi), ('weight', args.weight)] if v is not None)
        detector_values = _stream_section(ctx, 'detector')
        detector_values.update((k, v) for k, v in [
            ('time_resolution', args.time_resolution),
            ('energy_resolution', args.energy_resolution)] if v is not None)
        emitter = EmitterConfig(**emitter_values)
        detector = DetectorConfig(**detector_values)
        n_frames = settings(ctx, args, 'stream', ['frames'])['frames'] or DEFAULT_FRAMES
        frames = simulate_frames(emitter, detector, n_frames, seed=seed_of(ctx, args),
                                 threads=threads_of(ctx, args))
        filename = output_filename(ctx, args, 'frames.txt')
        write_frame_file(filename, frames)
        ctx.logger.info('wrote %d clicks in %d frames to %s in %.1f s (frames id %s)',
                        len(frames), frames.n_frames, filename, time.time() - started,
                        frames_id(frames))


@register_subcommand
class Correlate(object):
    """
    Two-photon correlations of the clicks in a frame file

    With ``--scan WIDTH`` every pair of energy windows of that width is
    correlated and a two-photon spectrum is written. Otherwise
    ``--window1`` and ``--window2`` (``low,high`` in ueV) select two
    windows; their ``g2(tau)`` is written as a trace, or with
    ``--coincidence`` the zero-delay value and its standard error are
    printed. Standard errors come from resampling blocks of frames.
    Example::

        $ twophoton correlate frames.txt --scan 10.6 --tau-window 3.2 -o scan.csv
        $ twophoton correlate frames.txt --window1=-228.35,228.35 --window2=-228.35,228.35 --coincidence

    """
    command = 'correlate'

    @staticmethod
    def setup(ap):
        ap.add_argument('input', help='frame file written by "twophoton stream"')
        ap.add_argument('--scan', type=float, default=None, metavar='WIDTH',
                        help='Scan windows of WIDTH ueV over the whole camera')
        ap.add_argument('--window1', type=float_pair, default=None, help='First window, "lo,hi"')
        ap.add_argument('--window2', type=float_pair, default=None, help='Second window, "lo,hi"')
        ap.add_argument('--tau-bins', type=float_list, default=None, dest='tau_bins',
                        help='Delay bin edges in ps (default: %d detector time bins)'
                        % DEFAULT_TAU_BINS)
        ap.add_argument('--signed', action='store_true',
                        help='Bin signed delays instead of their magnitude')
        ap.add_argument('--coincidence', action='store_true',
                        help='Print the coincidence g2 of the two windows')
        ap.add_argument('--tau-window', type=float, default=None, dest='tau_window',
                        help='Largest delay counted as coincident, in ps; "inf" counts '
                        'whole frames (default: one time bin)')
        ap.add_argument('--blocks', type=int, default=None,
                        help='Frame blocks for the bootstrap (default: %d)' % DEFAULT_BLOCKS)
        ap.add_argument('--resamples', type=int, default=None,
                        help='Bootstrap resamples (default: %d)' % DEFAULT_RESAMPLES)

    @staticmethod
    def run(ctx, args):
        started = time.time()
        values = settings(ctx, args, 'stream', ['window_width', 'tau_window', 'blocks',
                                                'resamples'])
        width = args.scan if args.scan is not None else values['window_width']
        scan = args.window1 is None and args.window2 is None
        if scan and width is None:
            ctx.error('give --scan WIDTH or --window1 and --window2')
        if not scan and (args.window1 is None or args.window2 is None):
            ctx.error('--window1 and --window2 go together')
        n_blocks = values['blocks'] or DEFAULT_BLOCKS
        n_resamples = DEFAULT_RESAMPLES if values['resamples'] is None else values['resamples']
        seed = seed_of(ctx, args)
        frames = read_frame_file(args.input)
        parameters = {'input': args.input, 'frames_id': frames_id(frames), 'blocks': n_blocks,
                      'resamples': n_resamples}
        if scan:
            tau_window = values['tau_window']
            grid = scan_2ps(frames, width, tau_window, n_blocks, n_resamples, seed)
            parameters.update({'window_width': width, 'tau_window': grid.metadata['tau_window']})
            filename = output_filename(ctx, args, 'scan.csv')
            write_grid_file(filename, grid, provenance_header('correlate', parameters, seed=seed,
                                                           threads=threads_of(ctx, args)))
            ctx.logger.info('wrote %d x %d scan to %s in %.1f s', len(grid.omega1_axis),
                            len(grid.omega2_axis), filename, time.time() - started)
            return
        parameters.update({'window1': list(args.window1), 'window2': list(args.window2)})
        if args.coincidence:
            g2, error = window_g2(frames, args.window1, args.window2, values['tau_window'],
                                  n_blocks, n_resamples, seed)
            ctx.out_stream.write('g2 = %.6f +- %.6f\n' % (g2, error if error is not None
                                                          else float('nan')))
            return
        res = frames.detector.time_resolution
        edges = args.tau_bins
        if edges is None:
            edges = np.arange(DEFAULT_TAU_BINS + 1) * res
            if args.signed:
                edges = np.arange(-DEFAULT_TAU_BINS, DEFAULT_TAU_BINS + 1) * res + res / 2
        trace = correlate_clicks(frames, args.window1, args.window2, edges, fold=not args.signed,
                                 n_blocks=n_blocks, n_resamples=n_resamples, seed=seed)
        filename = output_filename(ctx, args, 'g2tau.csv')
        write_trace_file(filename, trace, provenance_header('correlate', parameters, seed=seed,
                                                           threads=threads_of(ctx, args)))
        ctx.logger.info('wrote %d delay bins to %s in %.1f s', len(trace.taus), filename,
                        time.time() - started)
