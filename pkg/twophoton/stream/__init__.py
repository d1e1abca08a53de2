from .detector import DetectorConfig, EmitterConfig, FrameSet, EMITTER_KINDS
from .simulate import simulate_frames, expected_pixel_profile
from .correlate import (PairHistogram, CoincidenceEstimator, correlate_clicks, scan_2ps,
                        window_g2, window_ladder, profile_test)
