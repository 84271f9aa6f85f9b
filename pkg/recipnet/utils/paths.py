import os
import errno
import shutil
import tempfile
from contextlib import contextmanager
from recipnet.exceptions import RecipNetUsageError

OUTPUT_ROOT_ENV = 'RECIPNET_OUTPUT_ROOT'


def remove_ignore_missing(path):
    try:
        try:
            shutil.rmtree(path)
        except OSError as e:
            if e.errno == errno.ENOTDIR:  # Not a directory
                os.remove(path)
            else:
                raise
    except OSError as e:
        if e.errno != errno.ENOENT:  # Doesn't exist
            raise


def output_dir(path):
    """
    Resolves an output directory, placing relative paths under the directory
    named by the RECIPNET_OUTPUT_ROOT environment variable (if set), and
    creates it if it doesn't exist
    """
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not os.path.isabs(path):
        path = os.path.join(root, path)
    if not os.path.isdir(path):
        try:
            os.makedirs(path)
        except OSError as e:
            raise RecipNetUsageError(
                "Could not create output directory '{}' ({})".format(
                    path, e))
    return path


@contextmanager
def atomic_write(path, mode='wb'):
    """
    Opens a temporary file next to ``path`` that is renamed over it once the
    block exits without error, so readers never see a partially written file
    """
    dirname = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(
        prefix='.' + os.path.basename(path) + '.', dir=dirname)
    try:
        with os.fdopen(fd, mode) as f:
            yield f
        os.replace(tmp_path, path)
    except BaseException:
        remove_ignore_missing(tmp_path)
        raise
