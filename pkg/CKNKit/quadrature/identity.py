"""
Test functions and the weighted distributional identity
Copyright (c) 2025 Arjun-M/CKNKit

    integral of Phi L*xi d(gamma) = c_{mu1,mu2} xi(0),   d(gamma) = |x|^(tau_+ - mu1) dx

For radial xi the weight collapses: Phi(r) r^(tau_+ - mu1 + N - 1) = r in the
subcritical regime (r (-ln r) in the critical one), so the radial integrand

    r L*xi(r) = -r xi'' + (mu1 - 2 tau_+ - (N - 1)) xi'

is bounded and the identity becomes a smooth one-dimensional integral.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError, ValidationError
from ..exponents import OperatorParams, Regime, exponent_data
from ..operator import RadialProfile, adjoint_drift, compact_bump
from .engine import QuadratureSpec, integrate_singular
from .sphere import angular_rule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TestFunction:
    """
    Compactly supported C^2 test function on R^N.

    Callables take points of shape (..., N); ``value`` and ``laplacian``
    return shape (...), ``gradient`` returns (..., N). Radial functions also
    carry their ``profile``, which the radial identity path integrates.
    """
    __test__ = False

    value: Callable
    gradient: Callable
    laplacian: Callable
    support_radius: float
    radial: bool = False
    profile: Optional[RadialProfile] = field(default=None, compare=False)
    name: str = "xi"

    def at_origin(self, N: float) -> float:
        if self.profile is not None:
            return float(self.profile.eval(np.array(0.0)))
        return float(self.value(np.zeros(int(round(N)))))


def _radius(x):
    r = np.linalg.norm(x, axis=-1)
    return r, np.where(r > 0, r, 1.0)


def from_profile(profile: RadialProfile) -> TestFunction:
    """Lift xi(x) = profile(|x|); the profile must satisfy profile'(0) = 0."""
    def value(x):
        return profile.eval(np.linalg.norm(x, axis=-1))

    def gradient(x):
        r, safe = _radius(x)
        scale = np.where(r > 0, profile.d1(safe) / safe, 0.0)
        return scale[..., None] * x

    def laplacian(x):
        N = x.shape[-1]
        r, safe = _radius(x)
        return np.where(
            r > 0,
            profile.d2(safe) + (N - 1.0) * profile.d1(safe) / safe,
            N * profile.d2(np.zeros_like(r)),
        )

    return TestFunction(value, gradient, laplacian, profile.support_radius, True, profile, profile.name)


def radial_bump(radius: float = 1.0, amplitude: float = 1.0) -> TestFunction:
    """xi(x) = amplitude * exp(1 - 1/(1 - |x/radius|^2)), xi(0) = amplitude"""
    return from_profile(compact_bump(radius, amplitude))


def vanishing_bump(radius: float = 1.0) -> TestFunction:
    """xi = |x|^2 bump(|x|): xi(0) = 0 and grad xi(0) = 0"""
    b = compact_bump(radius)
    profile = RadialProfile(
        lambda r: r * r * b.eval(r),
        lambda r: 2.0 * r * b.eval(r) + r * r * b.d1(r),
        lambda r: 2.0 * b.eval(r) + 4.0 * r * b.d1(r) + r * r * b.d2(r),
        support_radius=radius,
        name=f"r^2 bump({radius:g})",
    )
    return from_profile(profile)


def tilted_bump(radius: float = 1.0) -> TestFunction:
    """
    Non-radial xi(x) = b(|x|)(1 + x_1/2) with b the compact bump.

    grad xi  = b' (x/r) m + b e_1/2
    Delta xi = (b'' + (N-1) b'/r) m + b' x_1/r,   m = 1 + x_1/2
    """
    b = compact_bump(radius)
    radial = from_profile(b)

    def value(x):
        return b.eval(np.linalg.norm(x, axis=-1)) * (1.0 + 0.5 * x[..., 0])

    def gradient(x):
        m = 1.0 + 0.5 * x[..., 0]
        grad = radial.gradient(x) * m[..., None]
        e1 = np.zeros(x.shape[-1])
        e1[0] = 0.5
        return grad + b.eval(np.linalg.norm(x, axis=-1))[..., None] * e1

    def laplacian(x):
        r, safe = _radius(x)
        m = 1.0 + 0.5 * x[..., 0]
        cross = np.where(r > 0, b.d1(safe) * x[..., 0] / safe, 0.0)
        return radial.laplacian(x) * m + cross

    return TestFunction(value, gradient, laplacian, radius, False, None, f"tilted bump({radius:g})")


def translate(xi: TestFunction, z: Sequence[float]) -> TestFunction:
    """x -> xi(x - z); the identity then expects c xi(-z)"""
    shift = np.asarray(z, dtype=float)
    return TestFunction(
        lambda x: xi.value(x - shift),
        lambda x: xi.gradient(x - shift),
        lambda x: xi.laplacian(x - shift),
        xi.support_radius + float(np.linalg.norm(shift)),
        False,
        None,
        f"{xi.name}(x-z)",
    )


def combine(coeffs: Sequence[float], functions: Sequence[TestFunction]) -> TestFunction:
    """Linear combination sum_i coeffs[i] * functions[i]"""
    if len(coeffs) != len(functions) or not functions:
        raise ValidationError("combine needs one coefficient per test function")
    coeffs = [float(c) for c in coeffs]
    radial = all(f.radial and f.profile is not None for f in functions)
    profile = None
    if radial:
        profile = functions[0].profile.scaled(coeffs[0])
        for c, f in zip(coeffs[1:], functions[1:]):
            profile = profile + f.profile.scaled(c)

    def mix(attr):
        return lambda x: sum(c * getattr(f, attr)(x) for c, f in zip(coeffs, functions))

    return TestFunction(
        mix('value'), mix('gradient'), mix('laplacian'),
        max(f.support_radius for f in functions), radial, profile, "combination",
    )


@dataclass(frozen=True)
class IdentityResult:
    lhs: float
    expected: float
    residual: float
    converged: bool
    error_estimate: float
    evaluations: int
    path: str

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / max(1.0, abs(self.expected))

    def to_dict(self) -> dict:
        return {
            'lhs': self.lhs,
            'expected': self.expected,
            'residual': self.residual,
            'relative_residual': self.relative_residual,
            'converged': self.converged,
            'error_estimate': self.error_estimate,
            'evaluations': self.evaluations,
            'path': self.path,
        }


def _radial_integrand(params: OperatorParams, profile: RadialProfile, area: float) -> Callable:
    slope = adjoint_drift(params) - (params.N - 1.0)
    critical = params.regime is Regime.CRITICAL

    def g(r):
        out = area * (-r * profile.d2(r) + slope * profile.d1(r))
        return out * -np.log(r) if critical else out

    return g


def _sphere_integrand(params: OperatorParams, xi: TestFunction, resolution) -> Callable:
    directions, weights = angular_rule(params.N, resolution)
    drift = adjoint_drift(params)
    critical = params.regime is Regime.CRITICAL

    def g(r):
        points = r[:, None, None] * directions[None, :, :]
        radial_part = np.sum(directions[None, :, :] * xi.gradient(points), axis=-1)
        values = -r[:, None] * xi.laplacian(points) + drift * radial_part
        out = values @ weights
        return out * -np.log(r) if critical else out

    return g


def identity_residual(params: OperatorParams, xi: TestFunction, spec: QuadratureSpec = None,
                      angular_resolution: Tuple[int, ...] = None, force_sphere: bool = False) -> IdentityResult:
    """
    lhs = integral of Phi L*xi d(gamma), expected = c_{mu1,mu2} xi(0).

    Radial test functions use the reduced radial integrand for any real N;
    non-radial ones (or ``force_sphere``) use a sphere x radius product rule,
    available for N in {2, 3}. The integral runs over the support of xi only.

    Raises:
        InadmissibleParametersError: negative discriminant
        DomainError: non-radial path requested for N outside {2, 3}
    """
    spec = spec or QuadratureSpec()
    data = exponent_data(params)
    expected = data.c_const * xi.at_origin(params.N)
    # the identity is checked against max(1, |c xi(0)|), so the absolute floor scales with it
    spec = spec.with_tolerance(abs_tol=max(spec.abs_tol, spec.rel_tol * max(1.0, abs(expected))))

    if xi.radial and xi.profile is not None and not force_sphere:
        integrand = _radial_integrand(params, xi.profile, data.sphere_area)
        path = "radial"
    else:
        if params.N not in (2, 3):
            raise DomainError(f"non-radial identity needs N in {{2, 3}} (got N={params.N})", {'N': params.N})
        integrand = _sphere_integrand(params, xi, angular_resolution)
        path = "sphere"

    breakpoints = (1.0,) if params.regime is Regime.CRITICAL and xi.support_radius > 1.0 else ()
    result = integrate_singular(integrand, xi.support_radius, spec, breakpoints)
    if not result.converged:
        logger.warning(f"identity quadrature did not converge for {params.to_dict()} ({xi.name})")

    residual = result.value - expected
    logger.debug(f"identity {path}: lhs={result.value:.12g} expected={expected:.12g} residual={residual:.3e}")
    return IdentityResult(result.value, expected, residual, result.converged,
                          result.error_estimate, result.evaluations, path)
