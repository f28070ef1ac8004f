"""Thread-safe logging with colored terminal output.

Every stage of the detection pipeline reports through the static methods of
``Logger``. Output is colored with the blessed library and serialized by a
class-wide lock so that worker threads (forest training, cross-validation
replications, per-recording preprocessing) never interleave partial lines.

Example:
    ```python
    from hyperarousal.logger import Logger

    Logger.print_stage("preprocess", "imputing 20 recordings")
    Logger.print_info("Kept 9412 of 9596 windows")
    Logger.print_warning("Feature hrsd is constant; using deviation 1")
    Logger.print_debug("SMO iteration 1200, gap 0.0031")
    ```

Color Scheme:
    - Stage banners: Magenta
    - Error/Warning: Yellow
    - Info: Salmon
    - Performance: Cyan
    - Debug: Snow Gray
"""

import os
import sys
import threading
from datetime import datetime

import blessed

term = blessed.Terminal()

_TRUTHY = {"1", "true", "yes", "on"}


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in _TRUTHY


class Logger:
    """Thread-safe logging system with colored output.

    Attributes:
        _lock (threading.Lock): Serializes output across worker threads.
        _timestamps_enabled (bool): Whether to prepend timestamps to messages.
        _debug_enabled (bool): Whether ``print_debug`` emits anything.
    """

    _lock = threading.Lock()
    _timestamps_enabled = _env_flag("HYPERAROUSAL_TIMESTAMPS")
    _debug_enabled = _env_flag("HYPERAROUSAL_DEBUG")

    @staticmethod
    def enable_timestamps():
        """Enable timestamp prefixes for all log messages."""
        Logger._timestamps_enabled = True

    @staticmethod
    def disable_timestamps():
        """Disable timestamp prefixes for all log messages."""
        Logger._timestamps_enabled = False

    @staticmethod
    def enable_debug():
        """Enable debug logging."""
        Logger._debug_enabled = True

    @staticmethod
    def disable_debug():
        """Disable debug logging."""
        Logger._debug_enabled = False

    @staticmethod
    def is_debug_enabled() -> bool:
        return Logger._debug_enabled

    @staticmethod
    def configure_from_env():
        """Re-read the HYPERAROUSAL_DEBUG / HYPERAROUSAL_TIMESTAMPS switches."""
        if _env_flag("HYPERAROUSAL_DEBUG"):
            Logger.enable_debug()
        if _env_flag("HYPERAROUSAL_TIMESTAMPS"):
            Logger.enable_timestamps()

    @staticmethod
    def _get_timestamp():
        """Get formatted timestamp if timestamps are enabled."""
        if Logger._timestamps_enabled:
            return f"[{datetime.now().strftime('%H:%M:%S.%f')[:-3]}] "
        return ""

    @staticmethod
    def _emit(color, *args, **kwargs):
        kwargs.setdefault("file", sys.stderr)
        with Logger._lock:
            print(f"{color}{Logger._get_timestamp()}", end="", file=kwargs["file"])
            print(*args, **kwargs)
            print(term.normal, end="", file=kwargs["file"], flush=True)

    @staticmethod
    def print_stage(stage: str, message: str = ""):
        """Print a stage banner in magenta.

        Args:
            stage: Pipeline stage name (``preprocess``, ``train``, ...).
            message: Optional detail shown after the stage name.
        """
        suffix = f" {message}" if message else ""
        Logger._emit(term.magenta, f"[{stage}]{suffix}")

    @staticmethod
    def print_error(*args, **kwargs):
        """Print error messages in yellow.

        Args:
            *args: Variable length argument list to be printed.
            **kwargs: Arbitrary keyword arguments passed to print function.
        """
        Logger._emit(term.yellow, *args, **kwargs)

    @staticmethod
    def print_warning(*args, **kwargs):
        """Print warning messages in yellow.

        Used for conditions that do not stop the pipeline, such as constant
        features or windows rejected during feature extraction.
        """
        Logger._emit(term.yellow, *args, **kwargs)

    @staticmethod
    def print_info(*args, **kwargs):
        """Print informational messages in salmon."""
        Logger._emit(term.salmon1, *args, **kwargs)

    @staticmethod
    def print_debug(*args, **kwargs):
        """Print debug messages in snow gray.

        Only prints if debug logging is enabled.
        """
        if not Logger._debug_enabled:
            return
        Logger._emit(term.snow4, *args, **kwargs)

    @staticmethod
    def print_perf(*args, **kwargs):
        """Print performance timing messages in cyan."""
        Logger._emit(term.cyan, *args, **kwargs)

    @staticmethod
    def print_legend():
        """Print a color-coded legend of the message types."""
        with Logger._lock:
            print(term.magenta("===================="), file=sys.stderr)
            print(term.magenta("    COLOR LEGEND   "), file=sys.stderr)
            print(term.magenta("===================="), file=sys.stderr)
            print(term.magenta("Stage banners"), file=sys.stderr)
            print(term.yellow("Warnings/Errors"), file=sys.stderr)
            print(term.salmon1("Informational Messages"), file=sys.stderr)
            print(term.cyan("Timing"), file=sys.stderr)
            print(term.snow4("Debug Messages"), file=sys.stderr)
            print(term.magenta("===================="), file=sys.stderr)
