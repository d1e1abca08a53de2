"""
Helpers shared by the test suites
"""

import contextlib
import functools
import inspect
import logging
import os
import shutil
import tempfile
from textwrap import dedent

import numpy as np

from ..fileutils import silent_makedirs
from twophoton.util.logger_setup import configure_logging


class RaisedException(object):
    """What :func:`assert_raises` caught; `exc_val` is the exception"""
    exc_type = exc_val = None


@contextlib.contextmanager
def assert_raises(wanted_exc_type):
    """Like ``pytest.raises``, but the result keeps the exception as
    ``exc_val`` so tests can inspect the attributes the error carries
    """
    caught = RaisedException()
    try:
        yield caught
    except Exception as e:
        assert isinstance(e, wanted_exc_type), \
            'wanted %s but got %s: %s' % (wanted_exc_type.__name__, type(e).__name__, e)
        caught.exc_type, caught.exc_val = type(e), e
    else:
        raise AssertionError('%s not raised' % wanted_exc_type.__name__)


@contextlib.contextmanager
def temp_dir():
    """A fresh directory, by its real path, removed afterwards"""
    path = os.path.realpath(tempfile.mkdtemp(prefix='twophoton-test-'))
    try:
        yield path
    finally:
        shutil.rmtree(path, ignore_errors=True)


@contextlib.contextmanager
def working_directory(path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


@contextlib.contextmanager
def temp_working_dir():
    with temp_dir() as path:
        with working_directory(path):
            yield path


def temp_working_dir_fixture(func):
    """Run the test inside a fresh temporary working directory, passed as
    the first argument"""
    @functools.wraps(func)
    def in_temp_dir():
        with temp_working_dir() as d:
            return func(d)
    # hide the directory argument from pytest's fixture lookup
    in_temp_dir.__signature__ = inspect.Signature()
    return in_temp_dir


def cat(filename):
    with open(filename) as f:
        return f.read()


def dump(filename, contents):
    """Write the dedented `contents`, creating parent directories"""
    parent = os.path.dirname(filename)
    if parent:
        silent_makedirs(parent)
    with open(filename, 'w') as f:
        f.write(dedent(contents))


def assert_close(actual, desired, rtol=1e-7, atol=0.0):
    np.testing.assert_allclose(np.asarray(actual), np.asarray(desired), rtol=rtol, atol=atol)


# VERBOSE=1 shows the library's DEBUG log while the tests run
VERBOSE = bool(int(os.environ.get('VERBOSE', '0')))
configure_logging('DEBUG' if VERBOSE else 'WARNING')
logger = logging.getLogger() if VERBOSE else logging.getLogger('null_logger')
