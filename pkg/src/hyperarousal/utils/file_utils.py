"""File and directory utilities."""

import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, TextIO, Union

from hyperarousal.logger import Logger

PathLike = Union[str, os.PathLike]


def ensure_dir(path: PathLike) -> Path:
    """Create ``path`` (and parents) if needed and return it as a Path."""
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


@contextmanager
def atomic_write(path: PathLike, mode: str = "w") -> Iterator[TextIO]:
    """Open a temporary sibling of ``path`` and rename it into place on success.

    Readers never observe a partially written artifact. On error the temporary
    file is removed and the previous content of ``path`` (if any) is untouched.

    Args:
        path: Final destination.
        mode: ``"w"`` for text (UTF-8, ``\\n`` newlines) or ``"wb"`` for bytes.
    """
    target = Path(path)
    ensure_dir(target.parent)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        if "b" in mode:
            handle = os.fdopen(fd, mode)
        else:
            handle = os.fdopen(fd, mode, encoding="utf-8", newline="\n")
        with handle:
            yield handle
        os.replace(tmp_name, target)
        Logger.print_debug(f"wrote {target}")
    except BaseException:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise
