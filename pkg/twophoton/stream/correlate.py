"""
:mod:`twophoton.stream.correlate` -- Two-photon correlations from camera clicks
===============================================================================

Correlations are never normalized by an outside constant. The numerator
counts ordered pairs of distinct clicks of the same frame, the first in
window 1 and the second in window 2. The denominator is what the same
count would be for independent frames: the product of the two singles
time-marginals, summed over frames, correlated at the same lag and
divided by the number of frames. At long delays the ratio then goes to
1 by itself.

Frames are split into contiguous blocks; every accumulator is kept per
block and merged in frame order, and the standard errors come from
resampling blocks with replacement.
"""

import numpy as np
from scipy import signal, stats

from ..core.common import ConfigError, InsufficientStatisticsError
from ..core.sensors import SpectrumGrid, CorrelationTrace
from ..util.logger_setup import getLogger
from .simulate import expected_pixel_profile

logger = getLogger(__name__)

DEFAULT_BLOCKS = 20
DEFAULT_RESAMPLES = 100
LADDER_WIDTHS = (None, 158.8, 74.1)


def _blocks(fs, n_blocks):
    n_blocks = max(1, min(int(n_blocks), fs.n_frames))
    block = fs.frame_index * n_blocks // fs.n_frames
    frames = np.bincount(np.arange(fs.n_frames) * n_blocks // fs.n_frames, minlength=n_blocks)
    return n_blocks, block, frames


def ordered_pairs(fs, in1=None, in2=None):
    """Indices ``(first, second)`` of ordered pairs of distinct clicks of one frame

    `in1` and `in2` are boolean masks of the clicks allowed first and
    second; by default every click.
    """
    n = len(fs)
    in1 = np.ones(n, dtype=bool) if in1 is None else in1
    in2 = np.ones(n, dtype=bool) if in2 is None else in2
    first, second = [], []
    for k in range(1, n):
        i = np.arange(n - k)
        j = i + k
        same = fs.frame_index[i] == fs.frame_index[j]
        if not np.any(same):
            break
        i, j = i[same], j[same]
        forward = in1[i] & in2[j]
        backward = in1[j] & in2[i]
        first.extend([i[forward], j[backward]])
        second.extend([j[forward], i[backward]])
    if not first:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    return np.concatenate(first), np.concatenate(second)


def _singles(fs, block, n_blocks, mask):
    h = np.zeros((n_blocks, fs.detector.n_time_bins))
    np.add.at(h, (block[mask], fs.time_bins()[mask]), 1)
    return h


class PairHistogram(object):
    """
    Pairs binned in delay, and the singles time-marginals of both windows

    With `fold` the delay is binned by magnitude, so both orders of a
    pair land in the same bin.
    """

    def __init__(self, edges, resolution, pairs, singles1, singles2, frames, fold=True):
        self.edges = np.asarray(edges, dtype=float)
        self.resolution = float(resolution)
        self.pairs = np.asarray(pairs, dtype=float)
        self.singles1 = np.asarray(singles1, dtype=float)
        self.singles2 = np.asarray(singles2, dtype=float)
        self.frames = float(frames)
        self.fold = fold

    @classmethod
    def combine(cls, histograms, weights=None):
        """Weighted sum of histograms, taken in the order given"""
        weights = [1] * len(histograms) if weights is None else weights
        first = histograms[0]
        parts = [(w * h.pairs, w * h.singles1, w * h.singles2, w * h.frames)
                 for h, w in zip(histograms, weights)]
        pairs, s1, s2, frames = [sum(x) for x in zip(*parts)]
        return cls(first.edges, first.resolution, pairs, s1, s2, frames, first.fold)

    def merge(self, other):
        return PairHistogram.combine([self, other])

    def expected(self):
        """Pair counts of independent frames with the same singles"""
        if self.frames == 0:
            return np.zeros(len(self.edges) - 1)
        lags = signal.correlate(self.singles2, self.singles1, mode='full', method='direct')
        nt = len(self.singles1)
        tau = (np.arange(len(lags)) - (nt - 1)) * self.resolution
        if self.fold:
            tau = np.abs(tau)
        counts, _ = np.histogram(tau, bins=self.edges, weights=lags)
        return counts / self.frames

    def g2(self):
        expected = self.expected()
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(expected > 0, self.pairs / expected, np.nan)


def _pair_histograms(fs, window1, window2, edges, fold, n_blocks):
    d = fs.detector
    in1 = np.isin(fs.pixels, d.window_pixels(window1))
    in2 = np.isin(fs.pixels, d.window_pixels(window2))
    counts = (int(in1.sum()), int(in2.sum()))
    if 0 in counts:
        raise InsufficientStatisticsError('no clicks in window %s (singles %d, %d)'
                                          % ('1' if counts[0] == 0 else '2', counts[0], counts[1]),
                                          counts)
    n_blocks, block, frames = _blocks(fs, n_blocks)
    first, second = ordered_pairs(fs, in1, in2)
    tau = fs.times[second] - fs.times[first]
    if fold:
        tau = np.abs(tau)
    pairs = np.zeros((n_blocks, len(edges) - 1))
    for b in range(n_blocks):
        sel = block[first] == b
        pairs[b], _ = np.histogram(tau[sel], bins=edges)
    s1 = _singles(fs, block, n_blocks, in1)
    s2 = _singles(fs, block, n_blocks, in2)
    return [PairHistogram(edges, d.time_resolution, pairs[b], s1[b], s2[b], frames[b], fold)
            for b in range(n_blocks)]


def _bootstrap(estimate, n_blocks, n_resamples, seed):
    """Standard deviation of ``estimate(weights)`` over block resamples"""
    if n_resamples < 2 or n_blocks < 2:
        return None
    rng = np.random.default_rng(seed)
    values = []
    for r in range(n_resamples):
        weights = np.bincount(rng.integers(0, n_blocks, n_blocks), minlength=n_blocks)
        values.append(estimate(weights))
    with np.errstate(invalid='ignore'):
        return np.nanstd(np.array(values), axis=0, ddof=1)


def correlate_clicks(fs, window1, window2, tau_bins, fold=True, n_blocks=DEFAULT_BLOCKS,
                     n_resamples=DEFAULT_RESAMPLES, seed=0):
    """``g2(tau)`` between two energy windows as a :class:`CorrelationTrace`

    `tau_bins` are bin edges in ps (of ``|tau|`` when `fold`). The trace
    metadata keep the raw pair counts and their expectation.
    """
    edges = np.asarray(tau_bins, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ConfigError('delay bin edges must be increasing, got %r' % (tau_bins,))
    histograms = _pair_histograms(fs, window1, window2, edges, fold, n_blocks)
    total = PairHistogram.combine(histograms)
    values = total.g2()
    if np.any(np.isnan(values)):
        logger.warning('%d delay bins have no expected pairs', int(np.sum(np.isnan(values))))
    errors = _bootstrap(lambda w: PairHistogram.combine(histograms, w).g2(),
                        len(histograms), n_resamples, seed)
    centers = 0.5 * (edges[1:] + edges[:-1])
    metadata = {'window1': list(window1), 'window2': list(window2), 'frames': fs.n_frames,
                'pairs': total.pairs.tolist(), 'expected': total.expected().tolist(),
                'fold': fold}
    return CorrelationTrace(centers, values, metadata=metadata, errors=errors)


def _band_sum(h, lag):
    """``sum(h[..., t - lag : t + lag + 1])`` for every ``t``"""
    nt = h.shape[-1]
    c = np.concatenate([np.zeros(h.shape[:-1] + (1,)), np.cumsum(h, axis=-1)], axis=-1)
    t = np.arange(nt)
    return c[..., np.minimum(t + lag + 1, nt)] - c[..., np.maximum(t - lag, 0)]


class CoincidenceEstimator(object):
    """
    Pixel-level coincidences within ``|tau| <= tau_window``, per frame block

    Windows are given as membership matrices over pixels, one column
    per window.
    """

    def __init__(self, fs, tau_window=None, n_blocks=DEFAULT_BLOCKS):
        d = fs.detector
        self.fs = fs
        self.tau_window = d.time_resolution if tau_window is None else float(tau_window)
        if not self.tau_window >= 0:
            raise ConfigError('coincidence window must be non-negative, got %r' % tau_window)
        if np.isinf(self.tau_window):
            self.lag = d.n_time_bins
        else:
            self.lag = int(np.floor(self.tau_window / d.time_resolution + 1e-9))
        self.n_blocks, block, self.frames = _blocks(fs, n_blocks)
        n = d.n_pixels
        first, second = ordered_pairs(fs)
        near = np.abs(fs.times[second] - fs.times[first]) <= self.tau_window + 1e-9 * d.time_resolution
        first, second = first[near], second[near]
        self.pairs = np.zeros((self.n_blocks, n, n))
        np.add.at(self.pairs, (block[first], fs.pixels[first], fs.pixels[second]), 1)
        self.singles = np.zeros((self.n_blocks, n, d.n_time_bins))
        np.add.at(self.singles, (block, fs.pixels, fs.time_bins()), 1)
        logger.debug('%d coincident pairs within %r ps in %d blocks',
                     len(first), self.tau_window, self.n_blocks)

    def window_matrix(self, windows):
        d = self.fs.detector
        A = np.zeros((d.n_pixels, len(windows)))
        for j, window in enumerate(windows):
            A[d.window_pixels(window), j] = 1
        return A

    def ratio(self, A1, A2, weights=None):
        weights = np.ones(self.n_blocks) if weights is None else np.asarray(weights)
        frames = np.dot(weights, self.frames)
        pairs = A1.T @ np.tensordot(weights, self.pairs, axes=1) @ A2
        h = np.tensordot(weights, self.singles, axes=1)
        h1, h2 = A1.T @ h, A2.T @ h
        expected = h1 @ _band_sum(h2, self.lag).T / frames
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(expected > 0, pairs / expected, np.nan), h1.sum(axis=1), h2.sum(axis=1)

    def estimate(self, A1, A2, n_resamples=DEFAULT_RESAMPLES, seed=0):
        """``(g2, standard errors)`` for every pair of window columns"""
        values, n1, n2 = self.ratio(A1, A2)
        if np.any(np.isnan(values)):
            raise InsufficientStatisticsError('empty windows (singles %s and %s)'
                                              % (n1.astype(int).tolist(), n2.astype(int).tolist()),
                                              (n1, n2))
        errors = _bootstrap(lambda w: self.ratio(A1, A2, w)[0], self.n_blocks, n_resamples, seed)
        return values, errors


def window_count(detector, window_width):
    """Pixels per window; `window_width` must be a whole number of pixels"""
    step = detector.pixel_step_energy
    k = int(round(float(window_width) / step))
    if k < 1 or k > detector.n_pixels or abs(k * step - window_width) > 1e-6 * step:
        raise ConfigError('window width %r ueV is not a multiple of the %r ueV pixel step'
                          ' within the frame span' % (window_width, step))
    return k


def scan_2ps(fs, window_width, tau_window=None, n_blocks=DEFAULT_BLOCKS,
             n_resamples=DEFAULT_RESAMPLES, seed=0):
    """Coincidence ``g2`` for every pair of window positions

    Windows are `window_width` wide and step by one pixel. `tau_window`
    defaults to the time resolution; ``inf`` counts whole frames.
    """
    d = fs.detector
    k = window_count(d, window_width)
    centers = d.pixel_centers()
    n_windows = d.n_pixels - k + 1
    A = np.zeros((d.n_pixels, n_windows))
    for j in range(n_windows):
        A[j:j + k, j] = 1
    axis = 0.5 * (centers[:n_windows] + centers[k - 1:])
    estimator = CoincidenceEstimator(fs, tau_window, n_blocks)
    values, errors = estimator.estimate(A, A, n_resamples, seed)
    logger.info('scanned %d x %d windows of %r ueV over %d frames',
                n_windows, n_windows, window_width, fs.n_frames)
    return SpectrumGrid(axis, axis, values, Gamma=window_width, errors=errors, metadata={
        'units': 'ueV', 'window_width': float(window_width),
        'tau_window': estimator.tau_window, 'frames': fs.n_frames, 'clicks': len(fs)})


def window_g2(fs, window1, window2, tau_window=None, n_blocks=DEFAULT_BLOCKS,
              n_resamples=DEFAULT_RESAMPLES, seed=0):
    """Coincidence ``(g2, error)`` between two energy windows"""
    estimator = CoincidenceEstimator(fs, tau_window, n_blocks)
    values, errors = estimator.estimate(estimator.window_matrix([window1]),
                                        estimator.window_matrix([window2]), n_resamples, seed)
    return values[0, 0], None if errors is None else errors[0, 0]


def window_ladder(fs, probe, widths=LADDER_WIDTHS, tau_window=None, n_blocks=DEFAULT_BLOCKS,
                  n_resamples=DEFAULT_RESAMPLES, seed=0):
    """Antidiagonal coincidences at ``(-probe, probe)`` for windows of decreasing width

    A width of ``None`` spans the whole frame. Returns
    ``[(width, g2, error)]``.
    """
    d = fs.detector
    half = d.frame_span_energy / 2
    estimator = CoincidenceEstimator(fs, tau_window, n_blocks)
    ladder = []
    for width in widths:
        if width is None:
            low = high = (-half, half)
            width = d.frame_span_energy
        else:
            low = (max(-probe - width / 2, -half), min(-probe + width / 2, half))
            high = (max(probe - width / 2, -half), min(probe + width / 2, half))
        values, errors = estimator.estimate(estimator.window_matrix([low]),
                                            estimator.window_matrix([high]), n_resamples, seed)
        ladder.append((float(width), values[0, 0], None if errors is None else errors[0, 0]))
    return ladder


def profile_test(fs, emitter=None, minimum_expected=5.0):
    """Chi-square test of the energy marginal against :func:`expected_pixel_profile`

    Pixels expecting fewer than `minimum_expected` clicks are left out,
    and the expectation is rescaled to the observed total.
    """
    emitter = fs.emitter if emitter is None else emitter
    if emitter is None:
        raise ConfigError('the frame set carries no emitter to compare with')
    d = fs.detector
    observed = np.bincount(fs.pixels, minlength=d.n_pixels).astype(float)
    expected = expected_pixel_profile(emitter, d) * fs.n_frames
    keep = expected >= minimum_expected
    if keep.sum() < 2:
        raise InsufficientStatisticsError('too few clicks for a profile test',
                                          observed.sum())
    expected = expected[keep] * observed[keep].sum() / expected[keep].sum()
    return stats.chisquare(observed[keep], expected, ddof=1)
