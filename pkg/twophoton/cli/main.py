"""Main entry-point

The other ``twophoton.cli.*`` modules register their sub-commands using
the :func:`register_subcommand` decorator.
"""

import argparse
import logging
import os
import sys
import textwrap
import traceback

from ..core.common import ConfigError, NumericalError, InsufficientStatisticsError
from ..formats.config import load_config_file, RunConfig
from ..formats.marked_yaml import ValidationError
from ..util.logger_setup import set_log_level, configure_logging, has_error_occurred, log_to_file

logger = logging.getLogger()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_STATISTICS = 4
EXIT_UNCAUGHT = 127

#
# sub-command registration
#

_subcommands = {}


def register_subcommand(cls):
    """Register a subcommand for the ``twophoton`` command-line tool

    The provided `cls` should provide the following (see :cls:`Help` below
    for an example):

     - ``cls.__doc__`` is used as the help text; the first line is used as
       the one-liner in the command overview
     - ``cls.setup`` should be a function/static method that configures
       the passed-in argument parser
     - ``cls.run`` runs the command
    """
    name = getattr(cls, 'command', cls.__name__.lower())
    _subcommands[name] = cls
    return cls


class TwoPhotonCommandContext(object):
    def __init__(self, argparser, subcommand_parsers, out_stream, config_filename, env, logger):
        self.argparser = argparser
        self.subcommand_parsers = subcommand_parsers
        self.out_stream = out_stream
        self.env = env
        self.logger = logger
        self._config_filename = config_filename
        self._config = None

    def get_config(self):
        if self._config is None:
            if self._config_filename is None:
                self._config = RunConfig()
            else:
                self._config = load_config_file(self._config_filename, self.logger)
        return self._config

    def error(self, msg):
        self.argparser.error(msg)


def _parse_docstring(doc):
    # extract help one-liner
    for line in doc.splitlines():
        s = line.strip()
        if s:
            help = s
            break
    assert help
    # make description help text; do some light ReST->terminal for now
    description = textwrap.dedent(doc)
    description = description.replace('::\n', ':\n').replace('``', '"')
    return help, description


def command_line_entry_point(unparsed_argv, env, secondary=False):
    """
    The main ``twophoton`` command-line entry point

    Arguments:
    ----------

    unparsed_argv : list of str
        The unparsed command line arguments, program name first

    env : dict
        Environment

    secondary : boolean
        Leave the logging configuration alone (for callers that set it
        up themselves, such as the tests)
    """
    description = textwrap.dedent('''
    Frequency-filtered two-photon correlations: analytic form factors,
    sensor computations, condensate spectra and simulated camera frames
    ''')

    parser = argparse.ArgumentParser(prog='twophoton', description=description,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--config-file', default=env.get('TWOPHOTON_CONFIG'),
                        help='Run configuration file (YAML); command-line values take precedence')
    parser.add_argument('--log', default=None,
                        help='One of [DEBUG, INFO, ERROR, WARNING, CRITICAL], '
                        'or a logging configuration YAML file')
    parser.add_argument('--log-file', default=None, dest='log_file',
                        help='Also write every log line to this file')
    parser.add_argument('--seed', type=int, default=None,
                        help='Seed of every random draw (default: 0)')
    parser.add_argument('--threads', type=int, default=None,
                        help='Worker threads for grids and frames (default: 1)')
    parser.add_argument('--units', choices=['natural', 'physical'], default=None,
                        help='Units of frequencies and delays (default: natural)')
    parser.add_argument('--gamma-a-ueV', type=float, default=None, dest='gamma_a_ueV',
                        help='Emitter decay rate as an energy, for physical units')

    subparser_group = parser.add_subparsers(title='subcommands', dest='subcommand')
    subparser_group.required = True

    subcmd_parsers = {}
    for name, cls in sorted(_subcommands.items()):
        help, description = _parse_docstring(cls.__doc__)
        subcmd_parser = subparser_group.add_parser(
            name=name, help=help, description=description,
            formatter_class=argparse.RawDescriptionHelpFormatter)

        cls.setup(subcmd_parser)
        subcmd_parser.add_argument('-v', '--verbose', action='store_true', help='More verbose output')
        if getattr(cls, 'writes_output', True):
            subcmd_parser.add_argument('-o', '--output', default=None, help='Output file')

        subcmd_parser.set_defaults(subcommand_handler=cls.run, parser=parser,
                                   subcommand=name)
        # needed by Help
        subcmd_parsers[name] = subcmd_parser

    if len(unparsed_argv) == 1:
        # Print help by default rather than an error about too few arguments
        parser.print_help()
        return 1
    args = parser.parse_args(unparsed_argv[1:])
    if args.threads is not None and args.threads < 1:
        parser.error('--threads must be at least 1')

    if not secondary:
        configure_logging(args.log)
        if args.verbose:
            set_log_level('INFO')
            if args.log is not None:
                logger.warning('-v overrides --log to INFO')

    ctx = TwoPhotonCommandContext(parser, subcmd_parsers, sys.stdout, args.config_file, env, logger)

    if args.log_file is None:
        retcode = args.subcommand_handler(ctx, args)
    else:
        with log_to_file(None, args.log_file):
            retcode = args.subcommand_handler(ctx, args)
    if retcode is None:
        retcode = EXIT_OK
    return retcode


def help_on_exceptions(func, *args, **kw):
    """Turn exceptions into log messages and an exit code

    Calls func (typically a "main" function) and returns its return
    code. Errors in the input (bad configuration, model or frame files,
    unreadable files) return 2, numerical failures 3 and too few photon
    clicks 4. Anything else dumps the stack trace and returns 127.

    If the 'DEBUG' environment variable is set then the exception is
    raised anyway.
    """
    debug = len(os.environ.get('DEBUG', '')) > 0

    try:
        return func(*args, **kw)

    except KeyboardInterrupt:
        if debug:
            raise
        else:
            logger.info('Interrupted')
            return EXIT_UNCAUGHT
    except SystemExit:
        raise
    except (ValidationError, ConfigError, IOError) as e:
        if debug:
            raise
        else:
            logger.critical(str(e))
            return EXIT_CONFIG
    except NumericalError as e:
        if debug:
            raise
        else:
            logger.critical('%s: %s', type(e).__name__, e)
            return EXIT_NUMERICAL
    except InsufficientStatisticsError as e:
        if debug:
            raise
        else:
            logger.critical('%s (counts: %r)', e, e.counts)
            return EXIT_STATISTICS
    except:
        if debug:
            raise
        else:
            if not has_error_occurred():
                logger.critical("Uncaught exception:")
                for line in traceback.format_exc().splitlines():
                    logger.critical(line)
            return EXIT_UNCAUGHT

#
# help command
#


@register_subcommand
class Help(object):
    """
    Displays help about sub-commands
    """
    writes_output = False

    @staticmethod
    def setup(ap):
        ap.add_argument('command', help='The command to print help for', nargs='?')

    @staticmethod
    def run(ctx, args):
        if args.command is None:
            ctx.argparser.print_help()
        else:
            try:
                subcmd_parser = ctx.subcommand_parsers[args.command]
            except KeyError:
                ctx.error('Unknown sub-command: %s' % args.command)
            subcmd_parser.print_help()


if __name__ == '__main__':
    sys.exit(help_on_exceptions(command_line_entry_point, sys.argv, os.environ))
