#!/usr/bin/env python3
"""Structured logging with JSON support and file rotation.

Context passed as keyword arguments to a StructuredLogger travels on the
record as `extra_fields`. The JSON formatter merges it into the object; the
plain formatter appends it as `key=value` pairs.
"""

import json
import logging
import logging.handlers
from datetime import datetime
from typing import Any, Dict

import numpy as np

BYTES_PER_MB = 1024 * 1024
DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _to_json_value(value: Any) -> Any:
    """json.dumps fallback for numpy values and anything else unserializable"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset, tuple)):
        return list(value)
    return str(value)


def _context(record: logging.LogRecord) -> Dict[str, Any]:
    return getattr(record, 'extra_fields', None) or {}


class JSONLogFormatter(logging.Formatter):
    """One JSON object per record"""

    def format(self, record: logging.LogRecord) -> str:
        log_entry = {
            'timestamp': datetime.fromtimestamp(record.created).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }
        if record.exc_info:
            log_entry['exception'] = self.formatException(record.exc_info)
        log_entry.update(_context(record))
        return json.dumps(log_entry, default=_to_json_value)


class ContextFormatter(logging.Formatter):
    """Plain-text formatter that appends context fields"""

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        context = _context(record)
        if not context:
            return line
        pairs = " ".join(f"{key}={_format_value(value)}" for key, value in context.items())
        return f"{line} | {pairs}"


def _format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def build_formatter(config: Any) -> logging.Formatter:
    if getattr(config, 'json_logging', False):
        return JSONLogFormatter()
    return ContextFormatter(getattr(config, 'format', DEFAULT_LOG_FORMAT))


def configure_root_logger(config: Any) -> None:
    """
    Install console and rotating-file handlers on the root logger

    Args:
        config: LoggingConfig-like object with level, file (empty disables
                the file handler), max_size_mb, backup_count, json_logging
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(config.level.upper())
    root_logger.handlers.clear()

    formatter = build_formatter(config)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if config.file:
        file_handler = logging.handlers.RotatingFileHandler(
            filename=config.file,
            maxBytes=int(config.max_size_mb * BYTES_PER_MB),
            backupCount=config.backup_count,
        )
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)


class StructuredLogger:
    """Logger wrapper that attaches key-value context to records"""

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)

    def log_with_context(self, level: int, message: str, **context: Any) -> None:
        if not self.logger.isEnabledFor(level):
            return
        extra = {'extra_fields': context} if context else {}
        self.logger.log(level, message, extra=extra)

    def debug(self, message: str, **context: Any) -> None:
        self.log_with_context(logging.DEBUG, message, **context)

    def info(self, message: str, **context: Any) -> None:
        self.log_with_context(logging.INFO, message, **context)

    def warning(self, message: str, **context: Any) -> None:
        self.log_with_context(logging.WARNING, message, **context)


def get_structured_logger(name: str) -> StructuredLogger:
    return StructuredLogger(name)
