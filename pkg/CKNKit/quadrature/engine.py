"""
Adaptive quadrature with geometric clustering at the origin
Copyright (c) 2025 Arjun-M/CKNKit

Every panel is handed to QUADPACK through ``scipy.integrate.quad``; this
module adds the geometric panels toward r = 0 and the tail extrapolation.
"""

import math
import logging
from dataclasses import dataclass, replace
from typing import Callable, Iterable, List, Sequence

import numpy as np
from scipy import integrate

from ..exceptions import DomainError, ValidationError

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Tolerances and refinement limits.

    Args:
        rel_tol: Relative tolerance on the integral
        abs_tol: Absolute tolerance floor
        max_levels: Maximum number of geometric panels toward the origin
        cluster_ratio: Panel ratio c, panels are [R c^(k+1), R c^k]
        min_levels: Panels integrated before convergence may be declared
        max_subdivisions: Subinterval limit passed to QUADPACK per panel
    """
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_levels: int = 60
    cluster_ratio: float = 0.5
    min_levels: int = 6
    max_subdivisions: int = 100

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValidationError("rel_tol and abs_tol must be positive",
                                  context={'rel_tol': self.rel_tol, 'abs_tol': self.abs_tol})
        if not 0 < self.cluster_ratio < 1:
            raise ValidationError("cluster_ratio must lie in (0, 1)", context={'cluster_ratio': self.cluster_ratio})
        if self.max_levels < 1 or self.min_levels < 1 or self.max_subdivisions < 1:
            raise ValidationError("level and subdivision limits must be positive")

    def with_tolerance(self, rel_tol: float = None, abs_tol: float = None) -> "QuadratureSpec":
        return replace(
            self,
            rel_tol=self.rel_tol if rel_tol is None else rel_tol,
            abs_tol=self.abs_tol if abs_tol is None else abs_tol,
        )

    def to_dict(self) -> dict:
        return {
            'rel_tol': self.rel_tol,
            'abs_tol': self.abs_tol,
            'max_levels': self.max_levels,
            'cluster_ratio': self.cluster_ratio,
            'min_levels': self.min_levels,
            'max_subdivisions': self.max_subdivisions,
        }


@dataclass(frozen=True)
class QuadratureResult:
    """Integral estimate. ``roundoff`` is 100 eps times |value| of each summed piece."""
    value: float
    error_estimate: float
    evaluations: int
    converged: bool
    roundoff: float = 0.0

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            math.fsum([self.value, other.value]),
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
            self.roundoff + other.roundoff,
        )

    def scaled(self, factor: float) -> "QuadratureResult":
        return QuadratureResult(self.value * factor, self.error_estimate * abs(factor),
                                self.evaluations, self.converged, self.roundoff * abs(factor))

    def to_dict(self) -> dict:
        return {
            'value': self.value,
            'error_estimate': self.error_estimate,
            'evaluations': self.evaluations,
            'converged': self.converged,
        }


def _scalar(g: Callable) -> Callable:
    """Scalar adapter for integrands written against numpy arrays."""
    def f(x):
        return float(np.asarray(g(np.array([x])), dtype=float).reshape(-1)[0])
    return f


def quad_panel(g: Callable, a: float, b: float, rel_tol: float, abs_tol: float, limit: int,
               points: Sequence[float] = ()) -> QuadratureResult:
    """
    One QUADPACK call on [a, b] with optional interior break ``points``.

    ``converged`` is False when QUADPACK reports ier > 0 or a non-finite value.
    """
    out = integrate.quad(_scalar(g), a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit,
                         points=list(points) or None, full_output=1)
    value, error, info = out[0], out[1], out[2]
    converged = len(out) == 3 and math.isfinite(value) and math.isfinite(error)
    if len(out) > 3:
        logger.debug(f"quad on [{a:.3e}, {b:.3e}]: {out[3]}")
    return QuadratureResult(value, error, int(info['neval']), converged, 100.0 * EPS * abs(value))


def integrate_interval(g: Callable, a: float, b: float, spec: QuadratureSpec = None) -> QuadratureResult:
    """
    Adaptive QUADPACK integration on a finite interval [a, b].

    ``g`` must accept numpy arrays. Reversed limits give the negated integral.
    """
    spec = spec or QuadratureSpec()
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    if b < a:
        return integrate_interval(g, b, a, spec).scaled(-1.0)
    return quad_panel(g, a, b, spec.rel_tol, spec.abs_tol, spec.max_subdivisions)


def _panel(g: Callable, lo: float, hi: float, cuts: List[float], spec: QuadratureSpec) -> QuadratureResult:
    inside = [c for c in cuts if lo < c < hi]
    return quad_panel(g, lo, hi, spec.rel_tol / 4.0, spec.abs_tol / spec.max_levels,
                      spec.max_subdivisions + len(inside), inside)


def integrate_singular(g: Callable, R: float, spec: QuadratureSpec = None,
                       breakpoints: Iterable[float] = ()) -> QuadratureResult:
    """
    Integral of g over (0, R] for integrands with power/log behavior at 0.

    Panels [R c^(k+1), R c^k] are integrated adaptively, split at any
    ``breakpoints`` they contain. When successive panel increments contract
    geometrically with a constant sign, the remaining tail is estimated by
    Aitken extrapolation; growing or sign-changing increments are never
    extrapolated. Convergence requires ``min_levels`` panels and a change of
    the extrapolated value plus accumulated panel error below
    max(rel_tol |value|, abs_tol, roundoff).

    Args:
        g: Vectorized integrand
        R: Upper limit
        spec: Tolerances
        breakpoints: Interior points where g is not smooth

    Returns:
        QuadratureResult; converged=False carries the best estimate
    """
    spec = spec or QuadratureSpec()
    if not R > 0:
        raise DomainError("upper limit must be positive", {'R': R})
    cuts = sorted(float(b) for b in breakpoints)

    increments: List[float] = []
    panel_error = 0.0
    roundoff = 0.0
    evaluations = 0
    previous = None
    estimate = 0.0
    change = math.inf

    hi = R
    for level in range(spec.max_levels):
        lo = hi * spec.cluster_ratio
        panel = _panel(g, lo, hi, cuts, spec)
        hi = lo
        evaluations += panel.evaluations
        if not math.isfinite(panel.value):
            logger.warning(f"non-finite panel value at level {level} (r in [{lo:.3e}, {lo / spec.cluster_ratio:.3e}])")
            return QuadratureResult(math.fsum(increments), math.inf, evaluations, False, roundoff)

        increments.append(panel.value)
        panel_error += panel.error_estimate
        roundoff += panel.roundoff

        partial = math.fsum(increments)
        tail = 0.0
        if len(increments) >= 2 and increments[-2] != 0.0:
            q = increments[-1] / increments[-2]
            if 0.0 <= q < 1.0:
                tail = increments[-1] * q / (1.0 - q)
        estimate = partial + tail
        if previous is not None:
            change = abs(estimate - previous)
        previous = estimate

        tolerance = max(spec.rel_tol * abs(estimate), spec.abs_tol, roundoff)
        if level + 1 >= spec.min_levels and change + panel_error <= tolerance:
            logger.debug(f"integrate_singular converged after {level + 1} levels: {estimate:.12g}")
            return QuadratureResult(estimate, change + panel_error, evaluations, True, roundoff)

    logger.warning(f"integrate_singular did not converge in {spec.max_levels} levels (change {change:.3e})")
    return QuadratureResult(estimate, change + panel_error, evaluations, False, roundoff)
