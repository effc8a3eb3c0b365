"""
Fundamental solutions and the action of L_{mu1,mu2} on radial profiles
Copyright (c) 2025 Arjun-M/CKNKit

Closed forms for powers r^tau and power-logs r^tau (-ln r), plus
finite-difference application for cross-validation. Radial form:

    L u = -u'' - (N - 1 - mu1) u'/r + mu2 u/r^2
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from . import discrepancies
from .exponents import OperatorParams, Regime, exponent_data, indicial, indicial_derivative
from .exceptions import DomainError, InadmissibleParametersError, ValidationError

logger = logging.getLogger(__name__)

SMOOTHNESS_TAGS = ("C0", "C1", "C2")


def fd_step(r):
    """Centered-difference step 1e-4 r, so the stencil keeps the same relative width down to r = 0."""
    return 1e-4 * np.asarray(r, dtype=float)


@dataclass(frozen=True)
class RadialProfile:
    """
    A radial function with optional analytic derivatives.

    Missing derivatives are replaced by centered three-point differences with
    step ``fd_step(r)``. Callables must accept numpy arrays.

    Example:
        u = RadialProfile(lambda r: r**2, lambda r: 2*r, lambda r: 2 + 0*r)
        u.d2(np.array([0.5, 1.0]))
    """
    eval: Callable
    deriv1: Optional[Callable] = None
    deriv2: Optional[Callable] = None
    support_radius: float = math.inf
    smoothness: str = "C2"
    name: str = "profile"

    def __post_init__(self):
        if self.smoothness not in SMOOTHNESS_TAGS:
            raise ValidationError(f"unknown smoothness tag {self.smoothness!r}")
        if not self.support_radius > 0:
            raise ValidationError("support_radius must be positive")

    def __call__(self, r):
        return self.eval(r)

    def d1(self, r, h=None):
        if self.deriv1 is not None:
            return self.deriv1(r)
        r = np.asarray(r, dtype=float)
        h = fd_step(r) if h is None else h
        return (self.eval(r + h) - self.eval(r - h)) / (2.0 * h)

    def d2(self, r, h=None):
        if self.deriv2 is not None:
            return self.deriv2(r)
        r = np.asarray(r, dtype=float)
        h = fd_step(r) if h is None else h
        if self.deriv1 is not None:
            return (self.deriv1(r + h) - self.deriv1(r - h)) / (2.0 * h)
        return (self.eval(r + h) - 2.0 * self.eval(r) + self.eval(r - h)) / (h * h)

    def without_derivatives(self) -> "RadialProfile":
        """Same values, derivatives by finite differences only."""
        return RadialProfile(self.eval, None, None, self.support_radius, self.smoothness, self.name)

    def scaled(self, factor: float) -> "RadialProfile":
        d1 = None if self.deriv1 is None else (lambda r: factor * self.deriv1(r))
        d2 = None if self.deriv2 is None else (lambda r: factor * self.deriv2(r))
        return RadialProfile(lambda r: factor * self.eval(r), d1, d2, self.support_radius, self.smoothness, self.name)

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        has_d1 = self.deriv1 is not None and other.deriv1 is not None
        has_d2 = self.deriv2 is not None and other.deriv2 is not None
        return RadialProfile(
            lambda r: self.eval(r) + other.eval(r),
            (lambda r: self.deriv1(r) + other.deriv1(r)) if has_d1 else None,
            (lambda r: self.deriv2(r) + other.deriv2(r)) if has_d2 else None,
            max(self.support_radius, other.support_radius),
            min(self.smoothness, other.smoothness),
            f"{self.name}+{other.name}",
        )


# =====================================================
# PROFILE FACTORIES
# =====================================================

def power(tau: float, amplitude: float = 1.0) -> RadialProfile:
    """amplitude * r^tau"""
    return RadialProfile(
        lambda r: amplitude * np.power(r, tau),
        lambda r: amplitude * tau * np.power(r, tau - 1.0),
        lambda r: amplitude * tau * (tau - 1.0) * np.power(r, tau - 2.0),
        name=f"r^{tau:g}",
    )


def power_log(tau: float, amplitude: float = 1.0) -> RadialProfile:
    """amplitude * r^tau (-ln r)"""
    return RadialProfile(
        lambda r: amplitude * np.power(r, tau) * -np.log(r),
        lambda r: amplitude * np.power(r, tau - 1.0) * (tau * -np.log(r) - 1.0),
        lambda r: amplitude * np.power(r, tau - 2.0) * (tau * (tau - 1.0) * -np.log(r) - (2.0 * tau - 1.0)),
        name=f"r^{tau:g}(-ln r)",
    )


def power_log_squared(tau: float, amplitude: float = 1.0) -> RadialProfile:
    """amplitude * r^tau ln^2 r"""
    def d1(r):
        t = np.log(r)
        return amplitude * np.power(r, tau - 1.0) * (tau * t * t + 2.0 * t)

    def d2(r):
        t = np.log(r)
        return amplitude * np.power(r, tau - 2.0) * (tau * (tau - 1.0) * t * t + (2.0 * tau - 1.0) * 2.0 * t + 2.0)

    return RadialProfile(lambda r: amplitude * np.power(r, tau) * np.log(r) ** 2, d1, d2, name=f"r^{tau:g}ln^2 r")


def compact_bump(radius: float = 1.0, amplitude: float = 1.0) -> RadialProfile:
    """
    C-infinity bump b(r) = amplitude * exp(1 - 1/(1 - (r/radius)^2)) on [0, radius), 0 beyond.

    b(0) = amplitude, b'(0) = 0.
    """
    def _parts(r):
        r = np.asarray(r, dtype=float)
        s = r / radius
        inside = s < 1.0
        q = np.where(inside, 1.0 - s * s, 1.0)
        b = np.where(inside, amplitude * np.exp(1.0 - 1.0 / q), 0.0)
        return s, q, b, inside

    def value(r):
        return _parts(r)[2]

    def d1(r):
        s, q, b, inside = _parts(r)
        return np.where(inside, -2.0 * s * b / (q * q), 0.0) / radius

    def d2(r):
        s, q, b, inside = _parts(r)
        s2 = s * s
        return np.where(inside, b * (-2.0 / q ** 2 + 4.0 * s2 / q ** 4 - 8.0 * s2 / q ** 3), 0.0) / radius ** 2

    return RadialProfile(value, d1, d2, support_radius=radius, smoothness="C2", name=f"bump({radius:g})")


def gaussian(width: float = 1.0) -> RadialProfile:
    """exp(-r^2 / (2 width^2))"""
    w2 = width * width
    return RadialProfile(
        lambda r: np.exp(-np.asarray(r) ** 2 / (2.0 * w2)),
        lambda r: -np.asarray(r) / w2 * np.exp(-np.asarray(r) ** 2 / (2.0 * w2)),
        lambda r: (np.asarray(r) ** 2 / w2 - 1.0) / w2 * np.exp(-np.asarray(r) ** 2 / (2.0 * w2)),
        name=f"gauss({width:g})",
    )


def rational(power_: float = 1.0, scale: float = 1.0) -> RadialProfile:
    """(1 + (r/scale)^2)^(-power_)"""
    def value(r):
        return (1.0 + (np.asarray(r) / scale) ** 2) ** (-power_)

    def d1(r):
        r = np.asarray(r)
        return -2.0 * power_ * r / scale ** 2 * (1.0 + (r / scale) ** 2) ** (-power_ - 1.0)

    return RadialProfile(value, d1, None, name=f"(1+r^2)^-{power_:g}")


def log_cutoff_power(beta: float, width: float) -> RadialProfile:
    """
    r^beta (1 - (ln r / width)^2)^2 for |ln r| < width, 0 elsewhere.

    C^1 near-extremal family for the critical weighted Hardy inequality: with
    beta = (2 - N + 2a)/2 the inequality ratio is 1 + 3/(beta^2 width^2).
    """
    def value(r):
        r = np.asarray(r, dtype=float)
        s = np.log(r) / width
        inside = np.abs(s) < 1.0
        return np.where(inside, np.power(r, beta) * (1.0 - s * s) ** 2, 0.0)

    def d1(r):
        r = np.asarray(r, dtype=float)
        s = np.log(r) / width
        inside = np.abs(s) < 1.0
        g = (1.0 - s * s) ** 2
        dg = -4.0 * s * (1.0 - s * s) / width
        return np.where(inside, np.power(r, beta - 1.0) * (beta * g + dg), 0.0)

    return RadialProfile(value, d1, None, support_radius=math.exp(width), smoothness="C1",
                         name=f"r^{beta:g}-logcut({width:g})")


# =====================================================
# FUNDAMENTAL SOLUTIONS
# =====================================================

def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("radius must be positive", {'min_r': float(np.min(r)) if r.size else None})
    return r


def _require_admissible(params: OperatorParams):
    if not params.admissible:
        raise InadmissibleParametersError(context=params.to_dict())


def phi(params: OperatorParams, r):
    """
    Singular fundamental solution: r^tau_- (subcritical) or r^tau_0 (-ln r) (critical).

    The critical form changes sign at r = 1.
    """
    _require_admissible(params)
    r = _check_radius(r)
    data = exponent_data(params)
    if params.regime is Regime.CRITICAL:
        out = np.power(r, data.tau_zero) * -np.log(r)
    else:
        out = np.power(r, data.tau_minus)
    return out if out.ndim else float(out)


def gamma(params: OperatorParams, r):
    """Regular homogeneous solution r^tau_+."""
    _require_admissible(params)
    r = _check_radius(r)
    out = np.power(r, exponent_data(params).tau_plus)
    return out if out.ndim else float(out)


def fundamental_profiles(params: OperatorParams) -> Tuple[RadialProfile, RadialProfile]:
    """(Phi, Gamma) with analytic derivatives."""
    _require_admissible(params)
    data = exponent_data(params)
    if params.regime is Regime.CRITICAL:
        singular = power_log(data.tau_zero)
    else:
        singular = power(data.tau_minus)
    return singular, power(data.tau_plus)


class PowerAction(NamedTuple):
    coefficient: float
    exponent: float


class PowerLogAction(NamedTuple):
    coeff_log: float
    coeff_plain: float
    exponent: float


def apply_power(params: OperatorParams, tau: float) -> PowerAction:
    """L r^tau = c(tau) r^(tau-2)"""
    return PowerAction(float(indicial(params, tau)), tau - 2.0)


def apply_power_log(params: OperatorParams, tau: float) -> PowerLogAction:
    """L(r^tau (-ln r)) = c(tau) r^(tau-2)(-ln r) + (2 tau + N - 2 - mu1) r^(tau-2)"""
    discrepancies.flag("power-log-coefficient")
    return PowerLogAction(float(indicial(params, tau)), float(-indicial_derivative(params, tau)), tau - 2.0)


def apply_power_log_squared(params: OperatorParams, tau: float) -> Tuple[float, float, float, float]:
    """
    L(r^tau ln^2 r) = c r^(tau-2) ln^2 r + 2 c' r^(tau-2) ln r - 2 r^(tau-2).

    Returns (coeff_log2, coeff_log, coeff_plain, exponent).
    """
    return (float(indicial(params, tau)), float(2.0 * indicial_derivative(params, tau)), -2.0, tau - 2.0)


def apply_radial(params: OperatorParams, profile: RadialProfile, r, h=None):
    """
    -u'' - (N-1-mu1) u'/r + mu2 u/r^2, analytic derivatives when present.

    Raises:
        DomainError: r <= 0 or r outside the evaluable range of the profile
    """
    r = _check_radius(r)
    step = fd_step(r) if h is None else h
    if profile.deriv2 is None and np.any(r - step <= 0):
        raise DomainError("finite-difference stencil leaves (0, inf)", {'r': float(np.min(r))})
    u = profile.eval(r)
    du = profile.d1(r, step)
    d2u = profile.d2(r, step)
    out = -d2u - params.drift_exponent * du / r + params.mu2 * u / (r * r)
    if np.any(~np.isfinite(out)):
        raise DomainError("profile not evaluable at the requested radius")
    return out if np.ndim(out) else float(out)


def apply_divergence_form(N: float, a: float, profile: RadialProfile, r, h=None):
    """
    |x|^{2a} [ -div(|x|^{-2a} grad u) - ((N-2-2a)/2)^2 |x|^{-2(a+1)} u ] for radial u.

    Computed through the flux F(r) = r^{N-1-2a} u'(r) with a centered difference,
    independently of ``apply_radial``.
    """
    r = _check_radius(r)
    step = fd_step(r) if h is None else h
    k = N - 1.0 - 2.0 * a

    def flux(s):
        return np.power(s, k) * profile.d1(s)

    div = (flux(r + step) - flux(r - step)) / (2.0 * step) * np.power(r, -k)
    hardy = ((N - 2.0 - 2.0 * a) / 2.0) ** 2
    out = -div - hardy * profile.eval(r) / (r * r)
    return out if np.ndim(out) else float(out)


# =====================================================
# ADJOINT
# =====================================================

def adjoint_drift(params: OperatorParams) -> float:
    """Coefficient -2 tau_+ + mu1 of x.grad/|x|^2 in L*"""
    return -2.0 * exponent_data(params).tau_plus + params.mu1


def radial_adjoint(params: OperatorParams, profile: RadialProfile, r):
    """L* xi = -xi'' - (N-1) xi'/r + (-2 tau_+ + mu1) xi'/r for radial xi."""
    r = _check_radius(r)
    d1 = profile.d1(r)
    out = -profile.d2(r) - (params.N - 1.0) * d1 / r + adjoint_drift(params) * d1 / r
    return out if np.ndim(out) else float(out)


def apply_adjoint(params: OperatorParams, xi, x):
    """
    L* xi(x) = -Delta xi + (-2 tau_+ + mu1) x.grad xi / |x|^2.

    ``xi`` is a quadrature ``TestFunction``; ``x`` has shape (N,) or (..., N).
    """
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0):
        raise DomainError("L* xi is evaluated away from the origin")
    drift = np.sum(x * xi.gradient(x), axis=-1) / r2
    out = -xi.laplacian(x) + adjoint_drift(params) * drift
    return out if np.ndim(out) else float(out)


def _c_norms(xi, points: np.ndarray) -> Tuple[float, float]:
    """(||xi||_{C1}, ||xi||_{C2}) estimated on a point cloud."""
    value = np.max(np.abs(xi.value(points)), initial=0.0)
    grad = np.max(np.linalg.norm(xi.gradient(points), axis=-1), initial=0.0)
    second = np.max(np.abs(xi.laplacian(points)), initial=0.0)
    if xi.profile is not None:
        r = np.linalg.norm(points, axis=-1)
        r = r[r > 0]
        # Hessian eigenvalues of a radial function: xi'' and xi'/r
        second = max(second, np.max(np.abs(xi.profile.d2(r)), initial=0.0),
                     np.max(np.abs(xi.profile.d1(r) / r), initial=0.0))
    c1 = float(value + grad)
    return c1, float(c1 + second)


def adjoint_bound_check(params: OperatorParams, xi, sample_set) -> float:
    """
    max over samples of |L* xi(x)| / (||xi||_{C2} + ||xi||_{C1}/|x|).

    ``sample_set`` holds points of shape (M, N) or radii of shape (M,), the
    latter placed on the first axis. Norms are estimated on the samples
    together with a radial reference grid over the support of xi.
    """
    pts = np.asarray(sample_set, dtype=float)
    dim = int(round(params.N))
    if pts.ndim == 1:
        radii = pts
        pts = np.zeros((radii.size, dim))
        pts[:, 0] = radii
    radius = xi.support_radius
    ref_r = np.linspace(radius * 1e-3, radius, 400)
    ref = np.zeros((ref_r.size, dim))
    ref[:, 0] = ref_r
    c1, c2 = _c_norms(xi, np.vstack([pts, ref]))
    if c2 == 0.0:
        return 0.0
    r = np.linalg.norm(pts, axis=-1)
    ratio = np.abs(apply_adjoint(params, xi, pts)) / (c2 + c1 / r)
    return float(np.max(ratio))
