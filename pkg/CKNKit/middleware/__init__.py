"""
CKNKit Middleware System
Copyright (c) 2025 Arjun-M/CKNKit
"""

from .base import Middleware
from .logger import Logger, JsonFormatter, ColoredFormatter, configure_logging

__all__ = [
    'Middleware',
    'Logger',
    'JsonFormatter',
    'ColoredFormatter',
    'configure_logging',
]
