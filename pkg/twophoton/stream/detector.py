"""
:mod:`twophoton.stream.detector` -- Streak-camera frames and the emitters feeding them
======================================================================================

A *frame* is one sweep of the camera: a list of clicks, each a time in
ps since the start of the sweep and an energy in ueV relative to the
emitter line. The energy axis is divided into pixels of
``pixel_step_energy``; a click's energy is always a pixel centre.

Frames are phase-unlocked, so nothing is ever correlated across frames.
"""

from collections import namedtuple

import numpy as np

from ..core.common import ConfigError, HBAR_UEV_PS

EMITTER_KINDS = ('decaying-coherent', 'decaying-thermal', 'mixture', 'displaced-thermal')


def _positive(name, value):
    value = float(value)
    if not (value > 0 and np.isfinite(value)):
        raise ConfigError('%s must be positive, got %r' % (name, value))
    return value


class DetectorConfig(namedtuple('DetectorConfig', 'time_resolution energy_resolution '
                                'frame_span_time frame_span_energy pixel_step_energy')):
    """
    Times in ps, energies in ueV.

    >>> d = DetectorConfig()
    >>> d.n_pixels, float(d.pixel_centers()[d.n_pixels // 2])
    (43, 0.0)
    """
    __slots__ = ()

    def __new__(cls, time_resolution=3.2, energy_resolution=70.0, frame_span_time=1536.0,
                frame_span_energy=456.7, pixel_step_energy=10.6):
        values = [_positive(name, x) for name, x in zip(
            cls._fields, (time_resolution, energy_resolution, frame_span_time,
                          frame_span_energy, pixel_step_energy))]
        self = super(DetectorConfig, cls).__new__(cls, *values)
        if self.pixel_step_energy > self.energy_resolution:
            raise ConfigError('pixel step %r ueV is coarser than the energy resolution %r ueV'
                              % (self.pixel_step_energy, self.energy_resolution))
        if self.n_pixels < 1:
            raise ConfigError('energy span %r ueV holds no pixel of %r ueV'
                              % (self.frame_span_energy, self.pixel_step_energy))
        return self

    @property
    def n_pixels(self):
        return int(np.floor(self.frame_span_energy / self.pixel_step_energy + 1e-9))

    @property
    def n_time_bins(self):
        return int(np.ceil(self.frame_span_time / self.time_resolution - 1e-9))

    @property
    def filter_width(self):
        """Energy resolution as a Lorentzian filter width in rad/ps"""
        return self.energy_resolution / HBAR_UEV_PS

    def pixel_centers(self):
        n = self.n_pixels
        return (np.arange(n) - (n - 1) / 2.0) * self.pixel_step_energy

    def pixel_of(self, energies):
        """Pixel index of each energy; energies off the camera are -1"""
        n = self.n_pixels
        k = np.rint(np.asarray(energies, dtype=float) / self.pixel_step_energy
                    + (n - 1) / 2.0).astype(int)
        return np.where((k >= 0) & (k < n), k, -1)

    def window_pixels(self, window):
        """Indices of the pixels whose centres lie in the closed energy `window`"""
        lo, hi = float(window[0]), float(window[1])
        half = self.frame_span_energy / 2
        if not lo <= hi:
            raise ConfigError('energy window (%r, %r) is reversed' % (lo, hi))
        if lo < -half - 1e-9 or hi > half + 1e-9:
            raise ConfigError('energy window (%r, %r) leaves the frame span +-%r ueV'
                              % (lo, hi, half))
        tol = 1e-9 * self.pixel_step_energy
        centers = self.pixel_centers()
        pixels = np.flatnonzero((centers >= lo - tol) & (centers <= hi + tol))
        if len(pixels) == 0:
            raise ConfigError('energy window (%r, %r) contains no pixel' % (lo, hi))
        return pixels

    def to_tree(self):
        return dict(self._asdict())


class EmitterConfig(namedtuple('EmitterConfig', 'kind n0 gamma_a gamma_phi weight')):
    """
    Semiclassical emitter: a decaying field whose phase diffuses

    `n0` is the mean number of photons per frame, `gamma_a` and
    `gamma_phi` are in 1/ps. For ``mixture`` each frame is coherent with
    probability `weight` and thermal otherwise; for
    ``displaced-thermal`` a fraction `weight` of the photons is in the
    coherent part of every frame.
    """
    __slots__ = ()

    def __new__(cls, kind='decaying-coherent', n0=1.69, gamma_a=0.1, gamma_phi=0.1, weight=0.5):
        if kind not in EMITTER_KINDS:
            raise ConfigError('unknown emitter kind %r, expected one of %s'
                              % (kind, ', '.join(EMITTER_KINDS)))
        n0 = float(n0)
        if not (n0 >= 0 and np.isfinite(n0)):
            raise ConfigError('n0 must be a non-negative number, got %r' % n0)
        gamma_a = _positive('gamma_a', gamma_a)
        gamma_phi = float(gamma_phi)
        if not (gamma_phi >= 0 and np.isfinite(gamma_phi)):
            raise ConfigError('gamma_phi must be non-negative, got %r' % gamma_phi)
        weight = float(weight)
        if not 0 <= weight <= 1:
            raise ConfigError('weight must lie in [0, 1], got %r' % weight)
        return super(EmitterConfig, cls).__new__(cls, kind, n0, gamma_a, gamma_phi, weight)

    def g2_zero(self):
        """Unfiltered zero-delay correlation of the emitted photons"""
        w = self.weight
        return {'decaying-coherent': 1.0,
                'decaying-thermal': 2.0,
                'mixture': 2.0 - w,
                'displaced-thermal': 2.0 - w * w}[self.kind]

    def linewidth(self):
        """Full width of the emission line in rad/ps"""
        return self.gamma_a + self.gamma_phi

    def to_tree(self):
        return dict(self._asdict())


class FrameSet(object):
    """
    Clicks of `n_frames` frames as flat arrays sorted by frame, then time

    Parameters
    ----------
    detector : DetectorConfig

    n_frames : int
        Frames without clicks count too.

    frame_index, times, energies : array-like
        One entry per click; times in ps, energies in ueV.

    seed, emitter :
        Provenance; ``None`` for recorded or hand-built frames.
    """

    def __init__(self, detector, n_frames, frame_index, times, energies, seed=None, emitter=None):
        self.detector = detector
        self.n_frames = int(n_frames)
        frame_index = np.asarray(frame_index, dtype=np.int64)
        times = np.asarray(times, dtype=float)
        energies = np.asarray(energies, dtype=float)
        if not (frame_index.shape == times.shape == energies.shape) or times.ndim != 1:
            raise ConfigError('click arrays differ in shape')
        if self.n_frames < 1:
            raise ConfigError('a frame set needs at least one frame')
        if len(times):
            if frame_index.min() < 0 or frame_index.max() >= self.n_frames:
                raise ConfigError('click frame indices outside [0, %d)' % self.n_frames)
            if times.min() < 0 or times.max() >= detector.frame_span_time:
                raise ConfigError('click times outside the frame span [0, %r) ps'
                                  % detector.frame_span_time)
            if np.any(detector.pixel_of(energies) < 0):
                raise ConfigError('click energies outside the frame span +-%r ueV'
                                  % (detector.frame_span_energy / 2))
        order = np.lexsort((energies, times, frame_index))
        self.frame_index = frame_index[order]
        self.times = times[order]
        self.energies = energies[order]
        self.pixels = detector.pixel_of(self.energies)
        self.seed = seed
        self.emitter = emitter

    def __len__(self):
        return len(self.times)

    def __repr__(self):
        return '<FrameSet: %d clicks in %d frames>' % (len(self), self.n_frames)

    @property
    def mean_clicks(self):
        return len(self) / float(self.n_frames)

    def frames(self):
        """Yield ``(index, times, energies)`` for every frame, empty ones included"""
        bounds = np.searchsorted(self.frame_index, np.arange(self.n_frames + 1))
        for i in range(self.n_frames):
            lo, hi = bounds[i], bounds[i + 1]
            yield i, self.times[lo:hi], self.energies[lo:hi]

    def time_bins(self):
        """Index of the detector time bin of every click"""
        bins = np.floor(self.times / self.detector.time_resolution).astype(int)
        return np.minimum(bins, self.detector.n_time_bins - 1)
