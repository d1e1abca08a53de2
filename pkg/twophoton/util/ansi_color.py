r"""
Terminal colors for log lines

Log formats in ``logging_config.yaml`` place ``%(color)s`` and
``%(reset)s`` around the part of a line that should be highlighted;
:class:`~twophoton.util.logger_setup.TwoPhotonFormatter` fills them in
from :data:`LEVEL_COLORS`, or with empty strings when the output is not
a terminal::

    >>> import logging
    >>> from twophoton.util.ansi_color import level_color, CODES
    >>> level_color(logging.ERROR) + 'g2 = 0.71' + CODES['reset']
    '\x1b[31mg2 = 0.71\x1b[39;49;00m'
"""

import logging
import os
import sys

CODES = {
    'reset': '\x1b[39;49;00m',
    'gray': '\x1b[37m',
    'yellow': '\x1b[33m',
    'blue': '\x1b[34;01m',
    'red': '\x1b[31m',
    'bold_red': '\x1b[31;01m',
}

LEVEL_COLORS = {
    logging.DEBUG: 'gray',
    logging.INFO: 'yellow',
    logging.WARNING: 'blue',
    logging.ERROR: 'red',
    logging.CRITICAL: 'bold_red',
}


def want_color(stream=None):
    """
    Whether `stream` (default: stdout) is a terminal that takes colors

    ``NOCOLOR`` in the environment or a dumb ``TERM`` turn colors off.

        >>> want_color()
        False
    """
    if 'NOCOLOR' in os.environ or os.environ.get('TERM') in ('dumb', 'emacs'):
        return False
    stream = sys.stdout if stream is None else stream
    try:
        return stream.isatty()
    except (AttributeError, ValueError):
        return False


def level_color(levelno):
    """The escape code for a log level; levels in between take the one below"""
    known = [level for level in sorted(LEVEL_COLORS) if level <= levelno]
    return CODES[LEVEL_COLORS[known[-1] if known else logging.DEBUG]]
