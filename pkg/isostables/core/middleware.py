import functools
import logging
import time
from typing import Callable, Optional

from isostables.core.config import settings

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"

logger = logging.getLogger("isostables.cli")


def configure_logging(level: Optional[str] = None) -> None:
    """Send package logs to stderr in the project format."""
    root = logging.getLogger("isostables")
    root.setLevel((level or settings.LOG_LEVEL).upper())
    if not any(getattr(handler, "_isostables", False) for handler in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._isostables = True
        root.addHandler(handler)


def log_command(name: str) -> Callable:
    """Log the exit status and wall time of a CLI command."""

    def decorator(command: Callable) -> Callable:
        @functools.wraps(command)
        def wrapper(*args, **kwargs):
            start_time = time.time()

            exit_code = command(*args, **kwargs)
            processing_time = time.time() - start_time

            logger.info(f"{name} - {int(exit_code)} completed after {processing_time:.3f}s")
            return exit_code

        return wrapper

    return decorator
