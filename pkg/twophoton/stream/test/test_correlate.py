import numpy as np

from ...core.common import ConfigError, InsufficientStatisticsError, HBAR_UEV_PS
from ...core.analytic import DecayDephaseParams, FilterParams, boson_form_factor
from ...core.test.utils import assert_raises
from ..detector import DetectorConfig, EmitterConfig, FrameSet
from ..simulate import simulate_frames
from ..correlate import (ordered_pairs, correlate_clicks, scan_2ps, window_g2, window_ladder,
                         window_count, PairHistogram, CoincidenceEstimator)

PIXEL = (-5.3, 5.3)


def hand_frames():
    d = DetectorConfig(time_resolution=1.0)
    return FrameSet(d, 2, [0, 0, 1], [10.0, 20.0, 10.0], [0.0, 0.0, 0.0])


def test_ordered_pairs_stay_within_frames():
    fs = hand_frames()
    first, second = ordered_pairs(fs)
    assert sorted(zip(first.tolist(), second.tolist())) == [(0, 1), (1, 0)]
    only_late = fs.times > 15
    first, second = ordered_pairs(fs, only_late, None)
    assert list(zip(first.tolist(), second.tolist())) == [(1, 0)]


def test_hand_built_pair_count():
    trace = correlate_clicks(hand_frames(), PIXEL, PIXEL, [8.0, 12.0], n_resamples=0)
    assert trace.metadata['pairs'] == [2.0]
    # singles correlate at +-10 ps: 2 + 2 pairs over 2 frames
    assert trace.metadata['expected'] == [2.0]
    assert trace.values.tolist() == [1.0]
    assert trace.taus.tolist() == [10.0]
    assert trace.errors is None


def test_signed_delays():
    trace = correlate_clicks(hand_frames(), PIXEL, PIXEL, [-12.0, -8.0, 8.0, 12.0],
                             fold=False, n_resamples=0)
    assert trace.metadata['pairs'] == [1.0, 0.0, 1.0]


def test_empty_window_is_insufficient():
    with assert_raises(InsufficientStatisticsError) as r:
        correlate_clicks(hand_frames(), PIXEL, (20.0, 40.0), [0.0, 10.0])
    assert r.exc_val.counts == (3, 0)
    with assert_raises(ConfigError):
        correlate_clicks(hand_frames(), PIXEL, PIXEL, [10.0, 5.0])


def test_pair_histograms_merge():
    edges = [0.0, 5.0, 10.0]
    a = PairHistogram(edges, 1.0, [1, 2], [1, 0, 0], [0, 1, 0], 3)
    b = PairHistogram(edges, 1.0, [0, 1], [0, 1, 0], [0, 0, 1], 2)
    merged = a.merge(b)
    assert merged.pairs.tolist() == [1.0, 3.0]
    assert merged.frames == 5
    assert merged.singles1.tolist() == [1.0, 1.0, 0.0]
    doubled = PairHistogram.combine([a, b], [2, 0])
    assert doubled.pairs.tolist() == [2.0, 4.0]


def test_independent_windows_are_uncorrelated():
    fs = simulate_frames(EmitterConfig(n0=8.0, gamma_phi=0.0), DetectorConfig(), 3000, seed=21)
    trace = correlate_clicks(fs, (-31.8, -10.6), (10.6, 31.8), [0.0, 12.8, 25.6, 51.2],
                             n_resamples=200)
    assert np.all(np.isfinite(trace.values))
    assert np.all(np.abs(trace.values - 1) < 3 * trace.errors), (trace.values, trace.errors)


def test_window_count():
    d = DetectorConfig()
    assert window_count(d, 10.6) == 1
    assert window_count(d, 74.2) == 7
    for width in (15.0, 0.0, 1000.0):
        with assert_raises(ConfigError):
            window_count(d, width)


def test_coincidence_window_counts_near_pairs_only():
    fs = hand_frames()
    estimator = CoincidenceEstimator(fs, tau_window=5.0, n_blocks=1)
    assert estimator.pairs.sum() == 0
    estimator = CoincidenceEstimator(fs, tau_window=10.0, n_blocks=1)
    assert estimator.pairs.sum() == 2
    A = estimator.window_matrix([PIXEL])
    values, n1, n2 = estimator.ratio(A, A)
    # lags 0 and +-10 ps of the singles: (5 + 4) / 2 frames
    assert abs(values[0, 0] - 2 / 4.5) < 1e-12
    with assert_raises(ConfigError):
        CoincidenceEstimator(fs, tau_window=-1.0)


def test_scan_reproduces_form_factor():
    gamma_a = gamma_phi = 0.1
    d = DetectorConfig()
    fs = simulate_frames(EmitterConfig(n0=20.0, gamma_a=gamma_a, gamma_phi=gamma_phi), d, 4000,
                         seed=2024)
    grid = scan_2ps(fs, 10.6, tau_window=np.inf, n_blocks=40, n_resamples=200)
    assert grid.values.shape == (43, 43)
    np.testing.assert_allclose(grid.values, grid.values.T, rtol=1e-12)
    p = DecayDephaseParams(1.0, gamma_phi / gamma_a)
    step = d.pixel_step_energy
    for m1, m2 in [(0, 0), (3, 3), (-3, 3), (3, 0), (-4, -1)]:
        i, j = 21 + m1, 21 + m2
        w1, w2 = [m * step / HBAR_UEV_PS / gamma_a for m in (m1, m2)]
        F = boson_form_factor(FilterParams(w1, w2, d.filter_width / gamma_a), p)
        assert abs(grid.values[i, j] - F) < 3 * grid.errors[i, j], (m1, m2, grid.values[i, j], F)


def test_window_ladder_widest_window_is_unfiltered():
    e = EmitterConfig('decaying-thermal', n0=4.0, gamma_phi=0.0)
    fs = simulate_frames(e, DetectorConfig(), 3000, seed=13)
    ladder = window_ladder(fs, 30.0, tau_window=np.inf)
    assert [w for w, g2, err in ladder] == [456.7, 158.8, 74.1]
    width, g2, err = ladder[0]
    assert abs(g2 - e.g2_zero()) < 3 * err
