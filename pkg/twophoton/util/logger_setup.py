"""
Logging setup for the numerical engine and the command line

EXAMPLES:

Back up the test runner's handlers first::

    >>> import logging
    >>> from twophoton.util.logger_setup import *
    >>> backup_config = LogConfigurationStore()

The root logger is used for plain status lines::

    >>> configure_logging('INFO')
    [INFO] configured logging: INFO
    >>> root = getLogger()
    >>> root.debug('residual 3e-15')
    >>> root.info('wrote grid.csv')
    [INFO] wrote grid.csv
    >>> root.error('steady state is not unique')
    [ERROR] steady state is not unique

The ``'progress'`` logger reports on long-running tasks (grid workers,
frame chunks) and prefixes every line with the task name::

    >>> task = getLogger('progress', 'cond2ps')
    >>> task.logger.name
    'progress'
    >>> task.debug('row 3/41')
    >>> task.info('row 4/41')
    [cond2ps] row 4/41
    >>> task.warning('linearity check marginal')
    [cond2ps] linearity check marginal
    >>> task.error('resolvent singular')
    [cond2ps|ERROR] resolvent singular

Raising the level silences both loggers::

    >>> set_log_level('ERROR')
    >>> task.warning('linearity check marginal')
    >>> root.info('wrote grid.csv')

    >>> backup_config.restore()
"""

import logging
import logging.config
import os

import yaml

from .ansi_color import want_color, level_color, CODES


class LogConfigurationStore(object):
    """
    Store the root logger configuration for doctesting purposes
    """

    def __init__(self):
        self._logger = logging.getLogger()
        self._orig_handlers = self._logger.handlers
        self._logger.handlers = []
        self._level = self._logger.level

    def restore(self):
        self._logger.handlers = self._orig_handlers
        self._logger.level = self._level


_ERROR_OCCURRED = False


def has_error_occurred():
    """
    Return whether an error was logged previously.
    """
    return _ERROR_OCCURRED


class TwoPhotonFormatter(logging.Formatter):
    """
    Fills in ``%(color)s`` and ``%(reset)s`` from the record level

    Records at ``ERROR`` and above use `error_fmt` when given. Colors
    are left out unless the output is a terminal.
    """
    def __init__(self, fmt, error_fmt=None, datefmt=None, use_color=None):
        logging.Formatter.__init__(self, fmt, datefmt)
        self._error_formatter = None if error_fmt is None else logging.Formatter(error_fmt, datefmt)
        self.use_color = want_color() if use_color is None else use_color

    def format(self, record):
        if record.levelno >= logging.ERROR:
            global _ERROR_OCCURRED
            _ERROR_OCCURRED = True
        record.color = level_color(record.levelno) if self.use_color else ''
        record.reset = CODES['reset'] if self.use_color else ''
        if record.levelno >= logging.ERROR and self._error_formatter is not None:
            return self._error_formatter.format(record)
        return logging.Formatter.format(self, record)


LOG_LEVELS = ('CRITICAL', 'ERROR', 'WARNING', 'INFO', 'DEBUG')


def configure_logging(config):
    """
    Configure the root logger

    Call once at program start; the command line does this after
    parsing ``--log``.

    Arguments:
    ----------

    config : string or ``None``.
       One of
       * a log level name, ``'CRITICAL'`` to ``'DEBUG'``.
       * the name of a logging configuration YAML file. See
         ``logging_config.yaml`` for which loggers are required.
       * ``None``. In this case, the bundled default is used.
    """
    default = os.path.join(os.path.dirname(__file__), 'logging_config.yaml')
    if config is None:
        _configure_logging_from_yaml(default)
    elif config.upper() in LOG_LEVELS:
        _configure_logging_from_yaml(default)
        set_log_level(config)
    else:
        _configure_logging_from_yaml(config)
    logging.getLogger().info('configured logging: %s', config)


def _configure_logging_from_yaml(filename):
    """
    Load logger configuration from YAML

    Arguments:
    ----------

    filename : str
        The name of the YAML file
    """
    with open(filename, 'r') as f:
        config_dict = yaml.safe_load(f)
    try:
        logging.config.dictConfig(config_dict)
    except (ValueError, TypeError, AttributeError, ImportError) as err:
        # nothing is configured to report this yet
        print('Configuring the logger encountered an exception: ' + str(err))
        raise


def set_log_level(level):
    """
    Set which log messages are displayed.

    Arguments:
    ----------

    level : string or int
        The desired log level as defined by the Python logging module
    """
    if isinstance(level, str):
        try:
            level = getattr(logging, level.upper())
        except AttributeError:
            raise ValueError('level must be integer or a valid log level string')
        if level not in [getattr(logging, name) for name in LOG_LEVELS]:
            raise ValueError('level must be integer or a valid log level string')
    logging.getLogger().setLevel(level=level)
    progress = logging.getLogger('progress')
    for handler in progress.handlers:
        if handler.name == 'progress_handler':
            handler.setLevel(level)


def getLogger(name=None, task=None):
    """
    Get Logger

    Extends ``logging.getLogger`` with a shortcut for the progress logger.

    Arguments:
    ----------

    name : str or ``None``
        The logger name. ``None`` is the root logger, ``'progress'``
        the task logger and ``'null_logger'`` the silent logger for
        tests. Module names (``__name__``) log through the root handlers.

    task : str (optional)
        Required only for the ``'progress'`` logger. The task name.
    """
    logger = logging.getLogger(name)
    if name == 'progress':
        return logging.LoggerAdapter(logger, {'task': task})
    return logger


class log_to_file(object):
    """
    Context manager to log to file

    Adds a file handler to a logger (the root logger for ``None``) for
    the duration of the block; used by ``twophoton --log-file``.
    """
    def __init__(self, name, filename):
        self.filename = filename
        self.logger = logging.getLogger(name)
        self.handler = h = logging.FileHandler(filename)
        h.setFormatter(logging.Formatter(
            fmt='%(asctime)s - %(levelname)s: [%(name)s] %(message)s',
            datefmt='%Y/%m/%d %H:%M:%S'))

    def __enter__(self):
        self.logger.addHandler(self.handler)

    def __exit__(self, exc_type, exc_value, traceback):
        self.handler.flush()
        self.handler.close()
        self.logger.removeHandler(self.handler)
