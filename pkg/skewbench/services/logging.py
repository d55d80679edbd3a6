"""
Structured logging for skewbench.

Batch runs emit one JSON object per record so result directories can be
matched to their logs; interactive runs get plain lines. Every record
emitted while an experiment runs carries its name and config hash.
"""

import logging
import sys
import time
from contextlib import contextmanager
from datetime import datetime, timezone
from functools import wraps
from typing import Any, Callable, Dict, Iterator, Optional, TypeVar

from pythonjsonlogger import jsonlogger

from skewbench.config.settings import settings

ROOT_LOGGER = "skewbench"

F = TypeVar("F", bound=Callable[..., Any])

_run_fields: Dict[str, Any] = {}


@contextmanager
def run_context(**fields: Any) -> Iterator[None]:
    """Attach ``fields`` to every package record until the block exits."""
    previous = dict(_run_fields)
    _run_fields.update(fields)
    try:
        yield
    finally:
        _run_fields.clear()
        _run_fields.update(previous)


class RunContextFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        for key, value in _run_fields.items():
            if not hasattr(record, key):
                setattr(record, key, value)
        return True


class RunJsonFormatter(jsonlogger.JsonFormatter):
    """One JSON object per record with UTC timestamp, level and source logger."""

    def add_fields(
        self,
        log_record: Dict[str, Any],
        record: logging.LogRecord,
        message_dict: Dict[str, Any],
    ) -> None:
        super().add_fields(log_record, record, message_dict)
        log_record.update(
            timestamp=datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            level=record.levelname,
            logger=record.name,
            message=record.getMessage(),
        )
        if record.exc_info and "exception" not in log_record:
            log_record["exception"] = self.formatException(record.exc_info)


def _handler(handler: logging.Handler, json_format: bool) -> logging.Handler:
    if json_format:
        handler.setFormatter(RunJsonFormatter("%(message)s"))
    else:
        handler.setFormatter(logging.Formatter(settings.LOG_FORMAT))
    handler.addFilter(RunContextFilter())
    return handler


class StructuredLogger:
    """
    Owns the handlers of the ``skewbench`` logger.

    Module loggers (``logging.getLogger(__name__)``) inherit the handlers, so
    services never configure output themselves.
    """

    def __init__(
        self,
        name: str = ROOT_LOGGER,
        level: str = "INFO",
        json_format: bool = True,
        stream: Any = None,
    ):
        self.json_format = json_format
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, level.upper(), logging.INFO))
        self.logger.handlers = [_handler(logging.StreamHandler(stream or sys.stderr), json_format)]
        self.logger.propagate = False

    def add_file(self, log_file: str) -> None:
        self.logger.addHandler(_handler(logging.FileHandler(log_file), self.json_format))


def log_timing(logger: Optional[logging.Logger] = None) -> Callable[[F], F]:
    """Decorator logging the wall time of a call at DEBUG."""

    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            log = logger or logging.getLogger(func.__module__)
            start = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                log.debug(
                    f"{func.__name__} finished",
                    extra={
                        "function_name": func.__name__,
                        "duration_ms": round((time.perf_counter() - start) * 1000, 2),
                    },
                )

        return wrapper  # type: ignore[return-value]

    return decorator


def setup_logging(
    level: str = "INFO",
    json_format: bool = True,
    log_file: Optional[str] = None,
) -> StructuredLogger:
    """
    Configure package-wide logging for a CLI run.

    Args:
        level: Log level name
        json_format: JSON records instead of plain lines
        log_file: Optional path that receives a copy of every record

    Returns:
        The StructuredLogger owning the package handlers
    """
    structured = StructuredLogger(level=level, json_format=json_format)
    if log_file:
        structured.add_file(log_file)
    return structured
