"""
CKNKit quadrature: singular integration, the distributional identity and the CKN check
Copyright (c) 2025 Arjun-M/CKNKit
"""

from .engine import QuadratureSpec, QuadratureResult, integrate_interval, integrate_singular
from .sphere import circle_rule, sphere_rule, angular_rule
from .identity import (
    TestFunction,
    IdentityResult,
    from_profile,
    radial_bump,
    vanishing_bump,
    tilted_bump,
    translate,
    combine,
    identity_residual,
)
from .ckn import CKNCheck, ckn_inequality_check, ckn_battery, run_battery, near_extremal_ratio

TEST_FUNCTIONS = {
    'bump': radial_bump,
    'vanishing-bump': vanishing_bump,
    'tilted-bump': tilted_bump,
}

__all__ = [
    'QuadratureSpec',
    'QuadratureResult',
    'integrate_interval',
    'integrate_singular',
    'circle_rule',
    'sphere_rule',
    'angular_rule',
    'TestFunction',
    'IdentityResult',
    'from_profile',
    'radial_bump',
    'vanishing_bump',
    'tilted_bump',
    'translate',
    'combine',
    'identity_residual',
    'CKNCheck',
    'ckn_inequality_check',
    'ckn_battery',
    'run_battery',
    'near_extremal_ratio',
    'TEST_FUNCTIONS',
]
