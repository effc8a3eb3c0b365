"""
CKNKit - Numerical toolkit for the CKN operator
Copyright (c) 2025 Arjun-M/CKNKit
Licensed under MIT License

Exponent calculus, fundamental solutions, singular quadrature, a Green-function
Poisson solver and Liouville nonexistence certificates for

    L u = -Delta u + mu1 x.grad(u)/|x|^2 + mu2 u/|x|^2
"""

__version__ = "1.0.0"
__author__ = "Arjun-M"
__license__ = "MIT"

from .exponents import (
    OperatorParams,
    Regime,
    ExponentData,
    classify_params,
    exponent_data,
    hardy_reduction,
    critical_exponents,
)
from .operator import RadialProfile, phi, gamma, apply_radial, apply_adjoint
from .quadrature import QuadratureSpec, identity_residual, ckn_inequality_check
from .poisson import SourceTerm, green_solve, singular_coefficient, weighted_l1_gate
from .liouville import bootstrap, liouville_verdict, numeric_step_witness, CaseTag, Termination
from .exceptions import CKNKitException, CKNKitError, ConfigurationError, ValidationError


__all__ = [
    "OperatorParams",
    "Regime",
    "ExponentData",
    "classify_params",
    "exponent_data",
    "hardy_reduction",
    "critical_exponents",
    "RadialProfile",
    "phi",
    "gamma",
    "apply_radial",
    "apply_adjoint",
    "QuadratureSpec",
    "identity_residual",
    "ckn_inequality_check",
    "SourceTerm",
    "green_solve",
    "singular_coefficient",
    "weighted_l1_gate",
    "bootstrap",
    "liouville_verdict",
    "numeric_step_witness",
    "CaseTag",
    "Termination",
    "CKNKitException",
    "CKNKitError",
    "ConfigurationError",
    "ValidationError",
]
