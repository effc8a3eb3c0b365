"""
Numerical and mathematical failure exceptions for CKNKit
Copyright (c) 2025 Arjun-M/CKNKit
"""

from .base import CKNKitException, ValidationError


class InadmissibleParametersError(ValidationError):
    """Discriminant (2-N+mu1)^2 + 4 mu2 is negative: no real exponents"""

    def __init__(self, message: str = "Inadmissible parameters: no real exponents", context: dict = None):
        super().__init__(message, "INADMISSIBLE", context)


class NoSerrinExponentError(ValidationError):
    """tau_+ >= 0, so the Serrin-type exponent is undefined"""

    def __init__(self, message: str = "no Serrin-type exponent (tau_+ >= 0)", context: dict = None):
        super().__init__(message, "NO_SERRIN_EXPONENT", context)


class HypothesisError(ValidationError):
    """A hypothesis of the nonexistence statement is violated"""

    def __init__(self, message: str, hypothesis: str, context: dict = None):
        self.hypothesis = hypothesis
        super().__init__(message, f"HYPOTHESIS_{hypothesis.upper()}", context)


class ConvergenceError(CKNKitException):
    """Numerical procedure failed to reach its tolerance"""

    def __init__(self, message: str, context: dict = None):
        super().__init__(message, "NO_CONVERGENCE", context)


class DivergentIntegralError(ConvergenceError):
    """An integral that must be finite diverges at an endpoint"""

    def __init__(self, message: str, endpoint: str, context: dict = None):
        self.endpoint = endpoint
        super().__init__(message, {**(context or {}), 'endpoint': endpoint})
        self.error_code = "DIVERGENT_INTEGRAL"


class AsymptoteError(ConvergenceError):
    """Sampled sequence has no clean tau_- asymptote"""
    pass


class GateDisagreementError(ConvergenceError):
    """Analytic and numeric integrability tests disagree (usually a bad theta hint)"""

    def __init__(self, message: str, context: dict = None):
        super().__init__(message, context)
        self.error_code = "GATE_DISAGREEMENT"


class NonexistenceError(CKNKitException):
    """
    The requested Poisson problem has no nonnegative solution.

    This is a mathematical finding rather than a numerical failure; the CLI
    reports it with exit code 0.
    """

    def __init__(self, message: str, reason: str, context: dict = None):
        self.reason = reason
        super().__init__(message, f"NONEXISTENCE_{reason.upper()}", context)
