"""
Logging middleware: logger configuration and per-command timing
Copyright (c) 2025 Arjun-M/CKNKit
"""

import json
import logging
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from .base import Middleware

LOG_FORMATS = ("text", "json", "colored", "compact")

# record attributes copied into JSON log lines when present
STRUCTURED_FIELDS = ('command', 'params', 'duration', 'error_code', 'error_type')


class JsonFormatter(logging.Formatter):
    """One JSON object per line, keys sorted, UTC timestamps"""

    def format(self, record):
        entry = {
            'timestamp': datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
        }
        for key in STRUCTURED_FIELDS:
            value = getattr(record, key, None)
            if value is not None:
                entry[key] = value
        if record.exc_info:
            entry['exception'] = self.formatException(record.exc_info)
        return json.dumps(entry, sort_keys=True, default=str)


class ColoredFormatter(logging.Formatter):
    """Level name wrapped in ANSI colors; the record itself is left untouched"""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
    }
    RESET = '\033[0m'

    def format(self, record):
        text = super().format(record)
        color = self.COLORS.get(record.levelname)
        if color is None:
            return text
        return text.replace(record.levelname, f"{color}{record.levelname}{self.RESET}", 1)


_FORMATTERS = {
    "text": lambda: logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s', '%Y-%m-%d %H:%M:%S'),
    "compact": lambda: logging.Formatter('%(asctime)s [%(levelname)s] %(message)s', '%H:%M:%S'),
    "colored": lambda: ColoredFormatter('%(asctime)s [%(levelname)s] %(name)s: %(message)s', '%H:%M:%S'),
    "json": JsonFormatter,
}


def configure_logging(level: str = "WARNING", format: str = "text",
                      destinations: Optional[List[logging.Handler]] = None,
                      formatter: Optional[logging.Formatter] = None) -> logging.Logger:
    """
    Point the ``CKNKit`` logger hierarchy at ``destinations`` (stderr by default).

    Existing handlers are replaced, so repeated runs in one process do not
    duplicate lines.
    """
    if format not in LOG_FORMATS:
        raise ValueError(f"unknown log format {format!r}; expected one of {LOG_FORMATS}")
    root = logging.getLogger("CKNKit")
    root.setLevel(getattr(logging, level.upper()))
    root.handlers.clear()
    for handler in destinations or [logging.StreamHandler(sys.stderr)]:
        handler.setFormatter(formatter or _FORMATTERS[format]())
        root.addHandler(handler)
    return root


@dataclass
class CommandTiming:
    runs: int = 0
    avg_seconds: float = 0.0
    max_seconds: float = 0.0
    min_seconds: float = float('inf')

    def add(self, seconds: float):
        self.runs += 1
        self.avg_seconds += (seconds - self.avg_seconds) / self.runs
        self.max_seconds = max(self.max_seconds, seconds)
        self.min_seconds = min(self.min_seconds, seconds)


class Logger(Middleware):
    """
    Logging middleware for CKNKit commands.

    Features:
    - Configures the ``CKNKit`` logger once per instance
    - text, json, colored and compact formats
    - stderr by default, so reports on stdout stay machine readable
    - Operator parameters attached to every command record
    - Per-command timing and a failure counter

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        format: Log format (text, json, colored, compact)
        destinations: Log handlers, default a stderr stream handler
        include_performance: Record and log command durations
        include_errors: Log failed commands
        slow_command_seconds: Duration above which a run is logged as a warning
        custom_formatter: Formatter used instead of the named format
    """

    def __init__(
        self,
        level: str = "WARNING",
        format: str = "text",
        destinations: Optional[List[logging.Handler]] = None,
        include_performance: bool = True,
        include_errors: bool = True,
        slow_command_seconds: float = 10.0,
        custom_formatter: Optional[logging.Formatter] = None
    ):
        self.logger = configure_logging(level, format, destinations, custom_formatter)
        self.format = format
        self.include_performance = include_performance
        self.include_errors = include_errors
        self.slow_command_seconds = slow_command_seconds
        self._timings: Dict[str, CommandTiming] = {}
        self._error_count = 0

    @staticmethod
    def _params(ctx) -> Dict[str, float]:
        config = ctx.config
        return {'N': config.N, 'mu1': config.mu1, 'mu2': config.mu2}

    async def on_command(self, ctx, next_handler):
        self.logger.info(f"running {ctx.command}", extra={'command': ctx.command, 'params': self._params(ctx)})
        start = time.perf_counter()
        try:
            await next_handler()
        finally:
            if self.include_performance:
                seconds = time.perf_counter() - start
                self._timings.setdefault(ctx.command, CommandTiming()).add(seconds)
                level = logging.WARNING if seconds > self.slow_command_seconds else logging.DEBUG
                prefix = "slow command " if level == logging.WARNING else ""
                self.logger.log(level, f"{prefix}{ctx.command} finished in {seconds:.3f}s",
                                extra={'command': ctx.command, 'duration': seconds})

    async def on_error(self, ctx, error):
        self._error_count += 1
        if not self.include_errors:
            return
        command = getattr(ctx, 'command', 'unknown')
        self.logger.error(f"{command} failed: {error}", extra={
            'command': command,
            'error_type': type(error).__name__,
            'error_code': getattr(error, 'error_code', None),
        })

    def get_performance_stats(self) -> Dict[str, Any]:
        return {
            'commands': {name: vars(timing).copy() for name, timing in self._timings.items()},
            'error_count': self._error_count,
        }
