import os
import errno
import tempfile
from contextlib import contextmanager


def silent_makedirs(path):
    """like os.makedirs, but does not raise error in the event that the directory already exists"""
    try:
        os.makedirs(path)
    except OSError:
        if not os.path.isdir(path):
            raise


def silent_unlink(path):
    """like os.unlink but does not raise error if the file does not exist"""
    try:
        os.unlink(path)
    except OSError as e:
        if e.errno != errno.ENOENT:
            raise


@contextmanager
def atomic_write(filename, mode='w'):
    """Write `filename` through a temporary file in the same directory

    The temporary file is renamed over `filename` only when the block
    exits normally, so readers never observe a partially written
    grid or frame file. On error the temporary file is removed.

    Example::

        with atomic_write('grid.csv') as f:
            f.write(text)
    """
    dirname = os.path.dirname(os.path.abspath(filename))
    silent_makedirs(dirname)
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix='.' + os.path.basename(filename) + '-')
    try:
        with os.fdopen(fd, mode, newline='\n' if 'b' not in mode else None) as f:
            yield f
        os.replace(tmp, filename)
    except:
        silent_unlink(tmp)
        raise
