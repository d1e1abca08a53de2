"""
Log capture for unit tests

:class:`log_capture` replaces the handlers of a logger for the duration
of a block and keeps every record::

    >>> from twophoton.util.logger_fixtures import log_capture
    >>> with log_capture() as log:
    ...    log.warning('truncation escalated to 12')
    ...    log.error('lambda ladder did not converge')
    >>> log.lines
    ('WARNING:truncation escalated to 12', 'ERROR:lambda ladder did not converge')
    >>> log.messages
    ('truncation escalated to 12', 'lambda ladder did not converge')

Tests assert that a line matching a regex was (or was not) emitted::

    >>> log.assertLogged('^WARNING.*escalated')
    >>> log.assertNotLogged('^ERROR.*escalated')
    >>> log.assertLogged('^ERROR.*escalated')
    Traceback (most recent call last):
    ...
    AssertionError: no log line matches '^ERROR.*escalated'
"""

import re
import logging

LINE_FORMAT = '%(levelname)s:%(message)s'


class _RecordingHandler(logging.Handler):

    def __init__(self):
        logging.Handler.__init__(self, logging.DEBUG)
        self.records = []
        self.setFormatter(logging.Formatter(LINE_FORMAT))

    def emit(self, record):
        self.records.append(record)


class CapturedLog(object):
    """
    The records seen by a :class:`log_capture` block

    Logging through the object itself goes to the captured logger.
    """

    def __init__(self, logger, handler):
        self.logger = logger
        self._handler = handler

    def __getattr__(self, name):
        if name in ('debug', 'info', 'warning', 'error', 'critical', 'log'):
            return getattr(self.logger, name)
        raise AttributeError(name)

    @property
    def lines(self):
        return tuple(self._handler.format(record) for record in self._handler.records)

    @property
    def messages(self):
        return tuple(record.getMessage() for record in self._handler.records)

    def _matching(self, search_pattern):
        return [line for line in self.lines if re.search(search_pattern, line)]

    def assertLogged(self, search_pattern):
        assert self._matching(search_pattern), 'no log line matches %r' % search_pattern

    def assertNotLogged(self, search_pattern):
        found = self._matching(search_pattern)
        assert not found, 'unexpected log line %r' % found[0]


class log_capture(object):
    """
    Context manager capturing the logger `name` (the root logger if
    omitted), e.g. ``'twophoton.core.lindblad'``, at ``DEBUG``
    """

    def __init__(self, name=None):
        self.logger = logging.getLogger(name)
        self.handler = _RecordingHandler()

    def __enter__(self):
        self._saved = (self.logger.handlers, self.logger.propagate, self.logger.level)
        self.logger.handlers = [self.handler]
        self.logger.propagate = False
        self.logger.setLevel(logging.DEBUG)
        return CapturedLog(self.logger, self.handler)

    def __exit__(self, exc_type, exc_value, traceback):
        self.logger.handlers, self.logger.propagate, level = self._saved
        self.logger.setLevel(level)
