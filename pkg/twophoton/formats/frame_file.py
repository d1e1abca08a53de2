"""
Frame files

A frame set is stored as line-oriented text: ``# key: value`` header
lines (JSON values) with the detector, the seed, the emitter and the
number of frames, then one block per frame, in frame order::

    # format: "frames"
    # detector: {"energy_resolution": 70.0, ...}
    # seed: 42
    # emitter: {"gamma_a": 0.1, ...}
    # frames: 2
    FRAME 0
    11.2,-10.6
    14.4,0.0
    FRAME 1

Click rows are ``t_ps,E_ueV``. Frames without clicks keep their
``FRAME`` line. The same frame set always gives the same bytes.
"""

import json

import numpy as np

from ..core.common import ConfigError
from ..core.fileutils import atomic_write
from ..stream.detector import DetectorConfig, EmitterConfig, FrameSet
from .grid_file import format_header
from .marked_yaml import ValidationError, text_mark


def write_frame_file(filename, frames):
    header = {'format': 'frames',
              'columns': 't_ps,E_ueV',
              'detector': frames.detector.to_tree(),
              'seed': frames.seed,
              'emitter': None if frames.emitter is None else frames.emitter.to_tree(),
              'frames': frames.n_frames}
    with atomic_write(filename) as f:
        f.write(format_header(header))
        for index, times, energies in frames.frames():
            f.write('FRAME %d\n' % index)
            for t, E in zip(times, energies):
                f.write('%r,%r\n' % (float(t), float(E)))


def read_frame_file(filename):
    header = {}
    frame_index, times, energies = [], [], []
    current = None
    seen = 0
    with open(filename) as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip('\n')
            mark = text_mark(filename, lineno)
            if line.startswith('#'):
                if current is not None:
                    raise ValidationError(mark, 'header line after the first frame')
                key, sep, value = line[1:].strip().partition(':')
                try:
                    header[key.strip()] = json.loads(value)
                except ValueError:
                    raise ValidationError(mark, 'header value of %r is not JSON' % key.strip())
            elif line.startswith('FRAME'):
                try:
                    current = int(line.split()[1])
                except (IndexError, ValueError):
                    raise ValidationError(mark, 'malformed frame line %r' % line)
                if current != seen:
                    raise ValidationError(mark, 'expected frame %d, got %d' % (seen, current))
                seen += 1
            elif line:
                if current is None:
                    raise ValidationError(mark, 'click before the first FRAME line')
                try:
                    t, E = [float(x) for x in line.split(',')]
                except ValueError:
                    raise ValidationError(mark, 'expected a "t_ps,E_ueV" row, got %r' % line)
                frame_index.append(current)
                times.append(t)
                energies.append(E)
    mark = text_mark(filename, 1)
    if header.get('format') != 'frames':
        raise ValidationError(mark, 'not a frame file (format %r)' % header.get('format'))
    if header.get('frames') != seen:
        raise ValidationError(mark, 'header announces %r frames, found %d'
                              % (header.get('frames'), seen))
    try:
        detector = DetectorConfig(**header['detector'])
        emitter = None if header.get('emitter') is None else EmitterConfig(**header['emitter'])
        return FrameSet(detector, seen, np.array(frame_index, dtype=np.int64), times, energies,
                        seed=header.get('seed'), emitter=emitter)
    except (ConfigError, KeyError, TypeError) as e:
        raise ValidationError(mark, 'inconsistent frame file: %s' % e, e)
