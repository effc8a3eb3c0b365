"""
Centralized exception handling for CKNKit
Copyright (c) 2025 Arjun-M/CKNKit
"""

import logging
from collections import Counter, defaultdict
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple, Type

from .base import CKNKitException, ConfigurationError, ValidationError
from .numerics import ConvergenceError, NonexistenceError


EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

# first match wins; nonexistence is a finding, not a failure
EXIT_CODES: Tuple[Tuple[Tuple[Type[BaseException], ...], int], ...] = (
    ((NonexistenceError,), EXIT_OK),
    ((ValidationError, ConfigurationError), EXIT_INPUT),
    ((ConvergenceError,), EXIT_NUMERICAL),
)


class CentralizedExceptionHandler:
    """
    Centralized exception handling for CKNKit commands.

    Features:
    - Exit code per exception family (0 finding, 2 input, 3 numerical, 1 anything else)
    - Callbacks registered per exception type
    - Counters by type, by context and by exit code

    Example:
        handler = CentralizedExceptionHandler()
        handler.register_handler(ConvergenceError, lambda exc, info: alerts.append(info))
        code = handler.handle_exception(error, "command_poisson")
    """

    def __init__(self):
        self.error_handlers: Dict[type, List[Callable]] = defaultdict(list)
        self._by_type: Counter = Counter()
        self._by_context: Counter = Counter()
        self._by_exit_code: Counter = Counter()
        self._last_error_time: Optional[datetime] = None
        self.logger = logging.getLogger('CKNKit.ExceptionHandler')

    def register_handler(self, exception_type: type, handler: Callable):
        """``handler(exception, info)`` runs for every handled instance of ``exception_type``."""
        self.error_handlers[exception_type].append(handler)

    @staticmethod
    def exit_code_for(exception: BaseException) -> int:
        for families, code in EXIT_CODES:
            if isinstance(exception, families):
                return code
        return EXIT_INTERNAL

    def handle_exception(self, exception: Exception, context: str = "unknown", **kwargs) -> int:
        """Count the exception, run matching callbacks and return its exit code."""
        code = self.exit_code_for(exception)
        exc_type = type(exception).__name__
        self._by_type[exc_type] += 1
        self._by_context[context] += 1
        self._by_exit_code[code] += 1
        self._last_error_time = datetime.now()

        if code == EXIT_INTERNAL:
            self.logger.error(f"Unexpected exception in {context}: {exception}", exc_info=True)
        else:
            self.logger.info(f"{exc_type} in {context}: {exception} (exit {code})")

        info = {'context': context, 'exit_code': code, **kwargs}
        for exception_type, handlers in self.error_handlers.items():
            if not isinstance(exception, exception_type):
                continue
            for handler in handlers:
                try:
                    handler(exception, info)
                except Exception as handler_error:
                    self.logger.error(f"Error in exception handler for {exc_type}: {handler_error}")
        return code

    def describe(self, exception: Exception) -> Dict[str, Any]:
        """Structured error entry for reports"""
        if isinstance(exception, CKNKitException):
            return exception.to_dict()
        return {'type': type(exception).__name__, 'message': str(exception), 'error_code': None, 'context': {}}

    def get_error_statistics(self) -> Dict[str, Any]:
        return {
            'total_errors': sum(self._by_type.values()),
            'errors_by_type': dict(self._by_type),
            'errors_by_context': dict(self._by_context),
            'errors_by_exit_code': dict(self._by_exit_code),
            'last_error_time': self._last_error_time,
        }
