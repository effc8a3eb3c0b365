"""
CKNKit Exceptions Module
Copyright (c) 2025 Arjun-M/CKNKit
"""

from .base import CKNKitException, CKNKitError, ConfigurationError, ValidationError, DomainError
from .handlers import CentralizedExceptionHandler, EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_NUMERICAL
from .numerics import (
    InadmissibleParametersError,
    NoSerrinExponentError,
    HypothesisError,
    ConvergenceError,
    DivergentIntegralError,
    AsymptoteError,
    GateDisagreementError,
    NonexistenceError,
)

__all__ = [
    'CKNKitException',
    'CKNKitError',
    'ConfigurationError',
    'ValidationError',
    'DomainError',
    'CentralizedExceptionHandler',
    'EXIT_OK',
    'EXIT_INTERNAL',
    'EXIT_INPUT',
    'EXIT_NUMERICAL',
    'InadmissibleParametersError',
    'NoSerrinExponentError',
    'HypothesisError',
    'ConvergenceError',
    'DivergentIntegralError',
    'AsymptoteError',
    'GateDisagreementError',
    'NonexistenceError',
]
