"""
Base exception classes for CKNKit
Copyright (c) 2025 Arjun-M/CKNKit
"""

class CKNKitException(Exception):
    """Base exception class for all CKNKit exceptions"""

    def __init__(self, message: str, error_code: str = None, context: dict = None):
        self.message = message
        self.error_code = error_code
        self.context = context or {}
        super().__init__(self.message)

    def __str__(self):
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message

    def to_dict(self):
        return {
            'type': self.__class__.__name__,
            'message': self.message,
            'error_code': self.error_code,
            'context': self.context
        }


class CKNKitError(CKNKitException):
    """General CKNKit error"""
    pass


class ConfigurationError(CKNKitException):
    """Configuration file or flag errors"""
    pass


class ValidationError(CKNKitException):
    """Input validation errors"""
    pass


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation (N < 2, r <= 0, theta <= -2, ...)"""

    def __init__(self, message: str, context: dict = None):
        super().__init__(message, "DOMAIN", context)
