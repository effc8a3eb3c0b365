"""
Numerical check of the critical weighted Hardy (CKN) inequality
Copyright (c) 2025 Arjun-M/CKNKit

    integral |x|^(-2a) |grad u|^2  >=  ((N-2-2a)/2)^2 integral |x|^(-2(a+1)) u^2,   a < (N-2)/2
"""

import logging
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from ..exceptions import DivergentIntegralError, DomainError
from ..exponents import sphere_area
from ..operator import RadialProfile, compact_bump, gaussian, log_cutoff_power, rational
from .engine import QuadratureResult, QuadratureSpec, integrate_singular

logger = logging.getLogger(__name__)

RATIO_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CKNCheck:
    """Both sides of the inequality for one radial function"""
    name: str
    lhs: float
    rhs: float
    ratio: float
    converged: bool
    diagnosis: str

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'ratio': self.ratio,
            'converged': self.converged,
            'diagnosis': self.diagnosis,
        }


def hardy_constant(N: float, a: float) -> float:
    return ((N - 2.0 - 2.0 * a) / 2.0) ** 2


def near_extremal_exponent(N: float, a: float) -> float:
    """beta = (2 - N + 2a)/2, the exponent of the extremal profile r^beta"""
    return (2.0 - N + 2.0 * a) / 2.0


def near_extremal_ratio(N: float, a: float, width: float) -> float:
    """Exact ratio 1 + 3/(beta^2 width^2) of the log-cutoff family"""
    beta = near_extremal_exponent(N, a)
    return 1.0 + 3.0 / (beta * beta * width * width)


def _half_line(g: Callable, spec: QuadratureSpec, what: str) -> QuadratureResult:
    """Integral of g over (0, inf): (0, 1] directly, (1, inf) through r = 1/t."""
    inner = integrate_singular(g, 1.0, spec)
    if not inner.converged:
        raise DivergentIntegralError(f"{what} diverges at the origin", endpoint="origin",
                                     context={'partial_value': inner.value})
    outer = integrate_singular(lambda t: g(1.0 / t) / (t * t), 1.0, spec)
    if not outer.converged:
        raise DivergentIntegralError(f"{what} diverges at infinity", endpoint="infinity",
                                     context={'partial_value': outer.value})
    return inner + outer


def ckn_inequality_check(N: float, a: float, u: RadialProfile, spec: QuadratureSpec = None) -> CKNCheck:
    """
    lhs = int |x|^{-2a}|grad u|^2 dx, rhs = ((N-2-2a)/2)^2 int |x|^{-2(a+1)} u^2 dx, ratio = lhs/rhs.

    Raises:
        DomainError: a >= (N-2)/2
        DivergentIntegralError: either side diverges; ``endpoint`` names where
    """
    spec = spec or QuadratureSpec()
    if not a < (N - 2.0) / 2.0:
        raise DomainError(f"CKN check needs a < (N-2)/2 (got N={N}, a={a})", {'N': N, 'a': a})

    area = sphere_area(N)
    constant = hardy_constant(N, a)

    def gradient_side(r):
        du = u.d1(r)
        return area * np.power(r, N - 1.0 - 2.0 * a) * du * du

    def potential_side(r):
        v = u.eval(r)
        return constant * area * np.power(r, N - 3.0 - 2.0 * a) * v * v

    lhs = _half_line(gradient_side, spec, "gradient integral")
    rhs = _half_line(potential_side, spec, "weighted L2 integral")
    if rhs.value <= 0.0:
        raise DomainError("u vanishes identically; the ratio is undefined", {'name': u.name})

    ratio = lhs.value / rhs.value
    if ratio >= 1.0 - RATIO_TOLERANCE:
        diagnosis = "inequality holds"
    else:
        diagnosis = f"ratio {ratio:.12g} below 1 beyond tolerance"
        logger.warning(f"CKN ratio below one for {u.name} at N={N}, a={a}: {ratio:.12g}")
    return CKNCheck(u.name, lhs.value, rhs.value, ratio, lhs.converged and rhs.converged, diagnosis)


def ckn_battery(N: float, a: float) -> List[RadialProfile]:
    """Ten radial functions with finite CKN integrals for any a < (N-2)/2."""
    beta = near_extremal_exponent(N, a)
    return [
        gaussian(1.0),
        gaussian(0.5),
        gaussian(2.0),
        rational(1.0),
        rational(2.0),
        rational(1.5, 0.5),
        compact_bump(1.0),
        compact_bump(3.0),
        log_cutoff_power(beta, 4.0),
        log_cutoff_power(beta, 8.0),
    ]


def run_battery(N: float, a: float, spec: QuadratureSpec = None) -> List[CKNCheck]:
    return [ckn_inequality_check(N, a, u, spec) for u in ckn_battery(N, a)]
