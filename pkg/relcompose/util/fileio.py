import io
import os
import tempfile

from relcompose.util.logger import get_logger

logger = get_logger(__name__)


def read_bytes(path):
    with io.open(path, 'rb') as f:
        return f.read()


def atomic_write(path, text):
    """Write `text` (utf-8) to `path` through a temp file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix='.{}.'.format(os.path.basename(path)), dir=directory)
    try:
        with io.open(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.debug('{} has been saved.'.format(path))


def write_files(directory, files):
    """Atomically write a {file name: text} dict into `directory`."""
    os.makedirs(directory, exist_ok=True)
    for name in sorted(files):
        atomic_write(os.path.join(directory, name), files[name])
