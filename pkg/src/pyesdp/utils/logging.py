"""
Logging configuration for pyesdp.

All modules log under the ``pyesdp`` logger tree. Nothing is printed until
:func:`setup_logging` is called; the solver reports its progress at DEBUG
level and finished solves, written files and sweeps at SUCCESS level.
"""

import logging
import logging.handlers
import os
import sys
from pathlib import Path
from typing import Literal

__all__ = [
    "PyEsdpFormatter",
    "PyEsdpFilter",
    "setup_logging",
    "get_logger",
    "enable_debug_mode",
    "disable_logging",
    "reset_logging",
    "SUCCESS_LEVEL",
]

ROOT_LOGGER_NAME = "pyesdp"

# Between INFO and WARNING
SUCCESS_LEVEL = 25
logging.addLevelName(SUCCESS_LEVEL, "SUCCESS")


def success(self, message, *args, **kwargs):
    """Log a message with severity 'SUCCESS'."""
    if self.isEnabledFor(SUCCESS_LEVEL):
        self._log(SUCCESS_LEVEL, message, args, **kwargs)


logging.Logger.success = success


class PyEsdpFormatter(logging.Formatter):
    """Console formatter with per-level colors and symbols."""

    ESC = "\x1b["
    RESET = ESC + "0m"

    COLORS = {
        "DEBUG": ESC + "36m",
        "INFO": ESC + "34m",
        "SUCCESS": ESC + "32m",
        "WARNING": ESC + "33m",
        "ERROR": ESC + "31m",
        "CRITICAL": ESC + "41;97m",
    }

    SYMBOLS = {
        "DEBUG": "○",
        "INFO": "i",
        "SUCCESS": "✓",
        "WARNING": "△",
        "ERROR": "✕",
        "CRITICAL": "⊗",
    }

    def __init__(
        self,
        include_colors: bool = True,
        include_module: bool = True,
        include_symbols: bool = True,
        minimal: bool = False,
    ):
        """
        Initialize the formatter.

        Args:
            include_colors (bool): Color the level name and symbol when the terminal supports it.
            include_module (bool): Include the logger name (``pyesdp.solver.admm``...).
            include_symbols (bool): Prefix each line with a level symbol.
            minimal (bool): Only print the message (and symbol).
        """
        self.include_colors = include_colors and self._supports_color()
        self.include_module = include_module
        self.include_symbols = include_symbols
        self.minimal = minimal

        if minimal:
            base_format = "%(message)s"
        else:
            base_format = "%(asctime)s"
            if include_module:
                base_format += " | %(name)-28s"
            base_format += " | %(levelname)-8s | %(message)s"

        super().__init__(base_format, datefmt="%H:%M:%S")

    @staticmethod
    def _supports_color() -> bool:
        """Check if stdout is a terminal that understands ANSI colors."""
        if os.environ.get("NO_COLOR"):
            return False
        if os.environ.get("FORCE_COLOR"):
            return True
        if not hasattr(sys.stdout, "isatty") or not sys.stdout.isatty():
            return False
        term = os.environ.get("TERM", "").lower()
        return "color" in term or term in ["xterm", "screen", "tmux"]

    def _symbol(self, levelname: str) -> str:
        symbol = self.SYMBOLS.get(levelname, "")
        if self.include_colors and symbol:
            return f"{self.COLORS[levelname]}{symbol}{self.RESET}"
        return symbol

    def format(self, record: logging.LogRecord) -> str:
        """Format the record, coloring a copy so other handlers see plain text."""
        record_copy = logging.makeLogRecord(record.__dict__)
        if self.include_colors and not self.minimal:
            color = self.COLORS.get(record.levelname, self.RESET)
            record_copy.levelname = f"{color}{record.levelname}{self.RESET}"

        message = super().format(record_copy)
        if self.include_symbols:
            return f"{self._symbol(record.levelname)} {message}"
        return message


class PyEsdpFilter(logging.Filter):
    """Filter out records of third-party libraries unless requested."""

    def __init__(self, include_external: bool = False):
        """
        Initialize the filter.

        Args:
            include_external (bool): Whether to let through records from other libraries.
        """
        super().__init__()
        self.include_external = include_external

    def filter(self, record: logging.LogRecord) -> bool:
        if record.name.startswith(ROOT_LOGGER_NAME):
            return True
        return self.include_external


def setup_logging(
    level: str | int = logging.INFO,
    format_style: Literal["standard", "minimal", "detailed"] = "standard",
    include_colors: bool = True,
    include_symbols: bool = True,
    log_file: str | Path | None = None,
    include_external: bool = False,
    max_file_size: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
) -> None:
    """
    Configure logging for pyesdp.

    Args:
        level: Logging level name or number. ``"SUCCESS"`` is accepted.
        format_style: ``"minimal"`` (message only), ``"standard"`` (time,
            level and message) or ``"detailed"`` (adds the module name).
        include_colors: Whether to use colored console output.
        include_symbols: Whether to prefix console lines with level symbols.
        log_file: Optional file to also write plain-text logs to (rotated).
        include_external: Whether to include records from other libraries.
        max_file_size: Maximum size of the log file before rotation (bytes).
        backup_count: Number of rotated files to keep.

    Examples:
        ```python
        setup_logging(level="DEBUG", format_style="detailed")
        setup_logging(log_file="logs/sweep.log")
        ```
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    root_logger = logging.getLogger(ROOT_LOGGER_NAME)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.setLevel(level)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(
        PyEsdpFormatter(
            include_colors=include_colors,
            include_module=format_style == "detailed",
            include_symbols=include_symbols,
            minimal=format_style == "minimal",
        )
    )
    record_filter = PyEsdpFilter(include_external=include_external)
    console_handler.addFilter(record_filter)
    root_logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_path,
            maxBytes=max_file_size,
            backupCount=backup_count,
            encoding="utf-8",
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(
            PyEsdpFormatter(
                include_colors=False,
                include_module=True,
                include_symbols=False,
            )
        )
        file_handler.addFilter(record_filter)
        root_logger.addHandler(file_handler)

    root_logger.propagate = False


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger below the ``pyesdp`` tree.

    Args:
        name: The logger name (usually ``__name__``).

    Returns:
        logging.Logger: The logger.
    """
    if not name.startswith(ROOT_LOGGER_NAME):
        if name == "__main__":
            name = f"{ROOT_LOGGER_NAME}.main"
        else:
            name = f"{ROOT_LOGGER_NAME}.{name}"
    return logging.getLogger(name)


def enable_debug_mode(include_external: bool = False) -> None:
    """Shortcut for detailed DEBUG output, including solver progress."""
    setup_logging(
        level=logging.DEBUG,
        format_style="detailed",
        include_external=include_external,
    )


def disable_logging() -> None:
    """Disable all logging output."""
    logging.getLogger(ROOT_LOGGER_NAME).setLevel(logging.CRITICAL + 1)


def reset_logging() -> None:
    """Reset logging to the silent default."""
    root_logger = logging.getLogger(ROOT_LOGGER_NAME)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.addHandler(logging.NullHandler())
    root_logger.setLevel(logging.WARNING)
    root_logger.propagate = True


def _ensure_default_config() -> None:
    root_logger = logging.getLogger(ROOT_LOGGER_NAME)
    if not root_logger.handlers:
        root_logger.addHandler(logging.NullHandler())
        root_logger.setLevel(logging.WARNING)


_ensure_default_config()
