"""
:mod:`twophoton.stream.simulate` -- Monte Carlo photon clicks
=============================================================

Each frame draws a classical field amplitude with a random global phase,
lets it decay at ``gamma_a`` while the phase diffuses at ``gamma_phi``,
and passes it through one causal Lorentzian filter per energy pixel::

    dB/dt = f(t) - (Gamma/2 + i omega_k) B

with ``Gamma`` the detector energy resolution and ``omega_k`` the pixel
energy over hbar. ``f`` is the photon-flux amplitude, so ``|f|**2`` is
the emission rate. Pixel ``k`` clicks as an inhomogeneous Poisson
process of rate ``Gamma domega |B_k|**2 / (2 pi)``, which makes the
rates summed over an unbounded row of pixels equal the emission rate.
Click times are quantized to the centre of their detector time bin.

Every frame has its own random stream spawned from the master seed, so
frame sets do not depend on the number of worker threads.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.signal import lfilter

from ..core.common import ConfigError, ResolutionError, HBAR_UEV_PS
from ..util.logger_setup import getLogger
from .detector import FrameSet

logger = getLogger(__name__)

STEP_FACTOR = 0.05
MAX_STEP_PHASE = 0.1
HORIZON_LIFETIMES = 25.0
CHUNK_FRAMES = 64


def _fastest_rate(emitter, detector):
    return max(emitter.gamma_a, emitter.gamma_phi, detector.filter_width)


def default_time_step(emitter, detector):
    return min(detector.time_resolution, STEP_FACTOR / _fastest_rate(emitter, detector))


def horizon(emitter, detector):
    """Time after which a frame holds no more clicks worth simulating"""
    slowest = min(emitter.gamma_a, detector.filter_width)
    return min(detector.frame_span_time, HORIZON_LIFETIMES / slowest)


def expected_pixel_profile(emitter, detector):
    """Mean clicks per frame in every pixel

    The emission line is a Lorentzian of full width
    ``gamma_a + gamma_phi``; the pixel filter broadens it by ``Gamma``.
    """
    width = emitter.linewidth() + detector.filter_width
    omega = detector.pixel_centers() / HBAR_UEV_PS
    step = detector.pixel_step_energy / HBAR_UEV_PS
    return emitter.n0 * step * (width / (2 * np.pi)) / ((width / 2) ** 2 + omega ** 2)


def _amplitude(rng, emitter):
    # every kind consumes the same draws
    theta = rng.uniform(0, 2 * np.pi)
    x, y = rng.standard_normal(2)
    u = rng.uniform()
    coherent = np.sqrt(emitter.n0) * np.exp(1j * theta)
    thermal = np.sqrt(emitter.n0 / 2) * (x + 1j * y)
    w = emitter.weight
    if emitter.kind == 'decaying-coherent':
        return coherent
    elif emitter.kind == 'decaying-thermal':
        return thermal
    elif emitter.kind == 'mixture':
        return coherent if u < w else thermal
    else:
        return np.sqrt(w) * coherent + np.sqrt(1 - w) * thermal


class _Simulator(object):

    def __init__(self, emitter, detector, dt):
        self.emitter = emitter
        self.detector = detector
        self.dt = dt
        self.n_steps = int(np.ceil(horizon(emitter, detector) / dt))
        self.t = np.arange(self.n_steps) * dt
        self.centers = detector.pixel_centers()
        gamma = detector.filter_width
        pole = gamma / 2 + 1j * self.centers / HBAR_UEV_PS
        self.z = np.exp(-pole * dt)
        self.c = (1 - self.z) / pole
        self.rate_scale = gamma * (detector.pixel_step_energy / HBAR_UEV_PS) / (2 * np.pi)

    def field(self, rng):
        e = self.emitter
        amplitude = _amplitude(rng, e)
        steps = rng.normal(0.0, np.sqrt(e.gamma_phi * self.dt), self.n_steps - 1)
        phase = np.concatenate([[0.0], np.cumsum(steps)])
        return np.sqrt(e.gamma_a) * amplitude * np.exp(-e.gamma_a * self.t / 2 + 1j * phase)

    def clicks(self, rng, rates):
        """Poisson clicks from per-pixel rates of shape ``(pixels, steps)``"""
        counts = rng.poisson(rates * self.dt)
        pixel, step = np.nonzero(counts)
        n = counts[pixel, step]
        pixel = np.repeat(pixel, n)
        step = np.repeat(step, n)
        t = (step + rng.uniform(size=len(step))) * self.dt
        res = self.detector.time_resolution
        t = (np.floor(t / res) + 0.5) * res
        keep = t < self.detector.frame_span_time
        return t[keep], self.centers[pixel[keep]]

    def chunk(self, seeds):
        rngs = [np.random.default_rng(s) for s in seeds]
        fields = np.array([self.field(rng) for rng in rngs])
        filtered = np.empty((len(self.centers),) + fields.shape, dtype=complex)
        for k in range(len(self.centers)):
            filtered[k] = lfilter([0, self.c[k]], [1, -self.z[k]], fields, axis=1)
        rates = self.rate_scale * np.abs(filtered) ** 2
        return [self.clicks(rng, rates[:, i, :]) for i, rng in enumerate(rngs)]


def simulate_frames(emitter, detector, n_frames, seed=0, threads=1, time_step=None):
    """Simulate `n_frames` camera frames of `emitter`

    Raises :class:`ResolutionError` when `time_step` times the fastest
    rate exceeds 0.1.
    """
    n_frames = int(n_frames)
    if n_frames < 1:
        raise ConfigError('need at least one frame, got %d' % n_frames)
    dt = default_time_step(emitter, detector) if time_step is None else float(time_step)
    rate = _fastest_rate(emitter, detector)
    if not dt > 0 or dt * rate > MAX_STEP_PHASE:
        raise ResolutionError('time step %r ps is too coarse for the rate %r/ps' % (dt, rate),
                              dt, rate)
    master = np.random.SeedSequence(seed)
    sim = _Simulator(emitter, detector, dt)
    logger.debug('simulating %d frames: step %r ps, %d steps, %d pixels',
                 n_frames, dt, sim.n_steps, len(sim.centers))
    seeds = master.spawn(n_frames)
    chunks = [seeds[i:i + CHUNK_FRAMES] for i in range(0, n_frames, CHUNK_FRAMES)]
    progress = getLogger('progress', 'stream')
    results = []
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        for i, chunk in enumerate(pool.map(sim.chunk, chunks)):
            results.extend(chunk)
            if (i + 1) % max(1, len(chunks) // 10) == 0:
                progress.info('%d of %d frames', min((i + 1) * CHUNK_FRAMES, n_frames), n_frames)
    frame_index = np.repeat(np.arange(n_frames), [len(t) for t, E in results])
    times = np.concatenate([t for t, E in results]) if results else np.zeros(0)
    energies = np.concatenate([E for t, E in results]) if results else np.zeros(0)
    frames = FrameSet(detector, n_frames, frame_index, times, energies,
                      seed=master.entropy, emitter=emitter)
    logger.info('simulated %d frames, %.3g clicks per frame', n_frames, frames.mean_clicks)
    return frames
