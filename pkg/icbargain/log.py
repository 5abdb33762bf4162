"""
Logging configuration for icbargain.
"""

import logging
import sys
from pathlib import Path

# Module-level logger
logger = logging.getLogger("icbargain")

_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)
_FORMAT = logging.Formatter(fmt="%(asctime)s [%(levelname)s] %(message)s", datefmt="%Y-%m-%d %H:%M:%S")


def setup_logging(verbosity: int = 0, log_file: Path | None = None) -> None:
    """
    Configure the icbargain logger.

    The console shows WARNING, INFO or DEBUG for verbosity 0, 1 or 2+. A log
    file, when given, is truncated and receives every DEBUG record whatever
    the verbosity.

    Args:
        verbosity: Number of -v flags
        log_file: Optional file for the full debug trace of the run
    """
    console_level = _LEVELS[min(max(verbosity, 0), len(_LEVELS) - 1)]

    for handler in logger.handlers:
        handler.close()
    logger.handlers.clear()
    logger.setLevel(logging.DEBUG if log_file else console_level)

    console = logging.StreamHandler(sys.stdout)
    console.setLevel(console_level)
    console.setFormatter(_FORMAT)
    logger.addHandler(console)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        trace = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        trace.setLevel(logging.DEBUG)
        trace.setFormatter(_FORMAT)
        logger.addHandler(trace)


def get_run_logger(out_dir: Path, name: str) -> logging.Logger:
    """
    Get a logger that records one command run in the output directory.

    Args:
        out_dir: Output directory of the run
        name: Log file name (e.g., "bargain", "sweep")

    Returns:
        Logger configured to write to out_dir/{name}.log
    """
    run_logger = logging.getLogger(f"icbargain.run.{name}")
    run_logger.setLevel(logging.DEBUG)

    for handler in run_logger.handlers:
        handler.close()
    run_logger.handlers.clear()

    file_handler = logging.FileHandler(out_dir / f"{name}.log")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(
        fmt="%(asctime)s %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    ))
    run_logger.addHandler(file_handler)

    # Don't propagate to parent logger
    run_logger.propagate = False

    return run_logger
