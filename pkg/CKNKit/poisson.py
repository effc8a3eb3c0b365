"""
Radial Poisson problem L u = f on the punctured ball B_R
Copyright (c) 2025 Arjun-M/CKNKit

Solutions come from variation of parameters with the basis (Phi, Gamma):

    u(r)   = k Phi(r) + u_p(r) + b Gamma(r),           b chosen so that u(R) = 0
    u_p(r) = W^-1 [ Phi(r) A(r) + Gamma(r) B(r) ]
    A(r)   = int_0^r Gamma(s) s^(N-1-mu1) f(s) ds
    B(r)   = int_r^R Phi(s) s^(N-1-mu1) f(s) ds

with W = tau_+ - tau_- (subcritical) or 1 (critical). A is finite exactly when
f is integrable against d(gamma) = |x|^(tau_+ - mu1) dx, which the gate checks
before any solve.
"""

import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import discrepancies
from .exponents import OperatorParams, Regime, exponent_data, hardy_reduction, indicial
from .exceptions import (
    AsymptoteError,
    DomainError,
    GateDisagreementError,
    NonexistenceError,
    ValidationError,
)
from .operator import RadialProfile, apply_radial, fundamental_profiles, power, power_log, power_log_squared
from .quadrature import QuadratureSpec, integrate_interval, integrate_singular

logger = logging.getLogger(__name__)

GATE_DECADES = 10
GATE_INDETERMINACY = 1e-4
GRID_DECADES = 12
GRID_POINTS_PER_DECADE = 20
RESONANCE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SourceTerm:
    """
    Radial right-hand side f(r) ~ r^theta_hint h(r) with h bounded near 0.

    ``power_law`` keeps (theta, amplitude) for pure powers so closed forms
    and resonance detection stay available.
    """
    profile: RadialProfile
    theta_hint: float
    power_law: Optional[Tuple[float, float]] = None

    @classmethod
    def power(cls, theta: float, amplitude: float = 1.0) -> "SourceTerm":
        """f(r) = amplitude * r^theta"""
        return cls(power(theta, amplitude), theta, (theta, amplitude))

    @classmethod
    def constant(cls, value: float = 1.0) -> "SourceTerm":
        return cls.power(0.0, value)

    @classmethod
    def zero(cls) -> "SourceTerm":
        return cls.power(0.0, 0.0)

    @property
    def vanishes(self) -> bool:
        return self.power_law is not None and self.power_law[1] == 0.0

    def __call__(self, r):
        return self.profile.eval(r)

    def __add__(self, other: "SourceTerm") -> "SourceTerm":
        return SourceTerm(self.profile + other.profile, min(self.theta_hint, other.theta_hint))

    def scaled_by_power(self, shift: float) -> "SourceTerm":
        """r^shift f(r)"""
        base = self.profile
        profile = RadialProfile(lambda r: np.power(r, shift) * base.eval(r), name=f"r^{shift:g}*{base.name}")
        law = None if self.power_law is None else (self.power_law[0] + shift, self.power_law[1])
        return SourceTerm(profile, self.theta_hint + shift, law)


# =====================================================
# EXISTENCE GATE
# =====================================================

class GateStatus(str, Enum):
    INTEGRABLE = "Integrable"
    DIVERGENT = "Divergent"


@dataclass(frozen=True)
class GateResult:
    """
    Decision on f in L^1(B_R, d gamma).

    ``analytic_margin`` is theta + tau_+ - mu1 + N (integrable iff > 0);
    ``numeric_exponent`` is the decay rate of the decade increments, None
    when f vanishes.
    """
    status: GateStatus
    value: Optional[float]
    analytic_margin: float
    numeric_exponent: Optional[float]
    decided_by: str

    @property
    def integrable(self) -> bool:
        return self.status is GateStatus.INTEGRABLE

    def to_dict(self) -> dict:
        return {
            'status': self.status.value,
            'value': self.value,
            'analytic_margin': self.analytic_margin,
            'numeric_exponent': self.numeric_exponent,
            'decided_by': self.decided_by,
        }


def weighted_l1_gate(params: OperatorParams, f: SourceTerm, R: float, spec: QuadratureSpec = None) -> GateResult:
    """
    Decide convergence of int_0^R |f(r)| r^(tau_+ - mu1 + N - 1) dr.

    The numeric test integrates decades [R 10^-(k+1), R 10^-k] in the log
    variable and reads the decay exponent off the last two; the analytic test
    uses theta_hint. A numeric exponent within 1e-4 of zero is indeterminate
    and the analytic sign decides.

    Raises:
        InadmissibleParametersError: negative discriminant
        GateDisagreementError: both tests decisive and of opposite sign
    """
    spec = spec or QuadratureSpec()
    if not R > 0:
        raise DomainError("domain radius must be positive", {'R': R})
    data = exponent_data(params)
    weight = data.tau_plus - params.mu1 + params.N - 1.0
    margin = f.theta_hint + data.tau_plus - params.mu1 + params.N

    if f.vanishes:
        return GateResult(GateStatus.INTEGRABLE, 0.0, margin, None, "zero-source")

    def in_log_variable(s):
        r = np.exp(s)
        return np.abs(f(r)) * np.power(r, weight + 1.0)

    top = math.log(R)
    step = math.log(10.0)
    decades = [
        integrate_interval(in_log_variable, top - (k + 1) * step, top - k * step, spec).value
        for k in range(GATE_DECADES)
    ]

    last, previous = decades[-1], decades[-2]
    if last == 0.0 and previous == 0.0 and not any(decades):
        return GateResult(GateStatus.INTEGRABLE, 0.0, margin, None, "zero-source")
    if last == 0.0:
        numeric = math.inf
    elif previous == 0.0:
        numeric = -math.inf
    else:
        numeric = -math.log10(last / previous)

    analytic_integrable = margin > 0.0
    if abs(numeric) <= GATE_INDETERMINACY:
        integrable, decided_by = analytic_integrable, "analytic"
    else:
        numeric_integrable = numeric > 0.0
        if numeric_integrable != analytic_integrable:
            raise GateDisagreementError(
                "numeric and analytic integrability tests disagree (check theta_hint)",
                context={'analytic_margin': margin, 'numeric_exponent': numeric, 'theta_hint': f.theta_hint},
            )
        integrable, decided_by = analytic_integrable, "both"

    if not integrable:
        logger.info(f"gate: source diverges against d(gamma) (margin {margin:.6g})")
        return GateResult(GateStatus.DIVERGENT, None, margin, numeric, decided_by)

    ratio = 0.0 if not math.isfinite(numeric) else 10.0 ** (-numeric)
    tail = last * ratio / (1.0 - ratio) if ratio < 1.0 else 0.0
    value = math.fsum(decades + [tail])
    logger.info(f"gate: source integrable, mass {value:.12g} (margin {margin:.6g})")
    return GateResult(GateStatus.INTEGRABLE, value, margin, numeric, decided_by)


# =====================================================
# CLOSED FORMS
# =====================================================

def closed_form_particular(params: OperatorParams, theta: float, amplitude: float = 1.0) -> Tuple[RadialProfile, Optional[str]]:
    """
    Particular solution of L u = amplitude * r^theta, and the resonant root if any.

    a = theta + 2:
      - non-resonant:          r^a / c(a)
      - simple root tau_pm:    r^a (-ln r) / (2a + N - 2 - mu1)
      - double root (critical): -r^a ln^2 r / 2
    """
    data = exponent_data(params)
    a = theta + 2.0
    scale = max(1.0, abs(a))

    def near(tau):
        return abs(a - tau) <= RESONANCE_TOLERANCE * scale

    if params.regime is Regime.CRITICAL and near(data.tau_zero):
        return power_log_squared(a, -0.5 * amplitude), "tau_zero"

    for label, tau in (("tau_minus", data.tau_minus), ("tau_plus", data.tau_plus)):
        if near(tau):
            discrepancies.flag("power-log-coefficient")
            plain = 2.0 * a + params.N - 2.0 - params.mu1
            return power_log(a, amplitude / plain), label

    return power(a, amplitude / float(indicial(params, a))), None


def power_source_solution(params: OperatorParams, theta: float, R: float, amplitude: float = 1.0):
    """
    Exact k = 0 solution for f = amplitude * r^theta on B_R (non-resonant a = theta + 2):

        u(r) = amplitude (r^a - R^(a - tau_+) r^tau_+) / c(a)
    """
    data = exponent_data(params)
    a = theta + 2.0
    c = float(indicial(params, a))
    tail = R ** (a - data.tau_plus)
    return lambda r: amplitude * (np.power(r, a) - tail * np.power(r, data.tau_plus)) / c


# =====================================================
# GREEN SOLVER
# =====================================================

class _NodeIntegrals:
    """A and B tabulated on a geometric grid, completed by short integrals from the nearest node below."""

    def __init__(self, params: OperatorParams, f: SourceTerm, R: float, spec: QuadratureSpec,
                 phi: RadialProfile, gamma: RadialProfile):
        self.spec = spec
        self.R = R
        self.weight = weight = params.N - 1.0 - params.mu1
        self.regular = lambda s: gamma.eval(s) * np.power(s, weight) * f(s)
        self.singular = lambda s: phi.eval(s) * np.power(s, weight) * f(s)

        count = GRID_DECADES * GRID_POINTS_PER_DECADE + 1
        self.grid = R * np.logspace(-GRID_DECADES, 0.0, count)
        self.grid[-1] = R

        first = integrate_singular(self.regular, float(self.grid[0]), spec)
        self.converged = first.converged
        a_pieces = [first.value]
        for lo, hi in zip(self.grid[:-1], self.grid[1:]):
            piece = integrate_interval(self.regular, float(lo), float(hi), spec)
            self.converged &= piece.converged
            a_pieces.append(piece.value)
        self.a_nodes = np.array([math.fsum(a_pieces[:i + 1]) for i in range(count)])

        b_pieces = []
        for lo, hi in zip(self.grid[:-1], self.grid[1:]):
            piece = integrate_interval(self.singular, float(lo), float(hi), spec)
            self.converged &= piece.converged
            b_pieces.append(piece.value)
        self.b_nodes = np.array([math.fsum(b_pieces[i:]) for i in range(count)])

    def at(self, r: float) -> Tuple[float, float]:
        if r > self.R * (1.0 + 1e-14):
            raise DomainError("radius outside the ball", {'r': r, 'R': self.R})
        r = min(r, self.R)
        if r < self.grid[0]:
            a = integrate_singular(self.regular, r, self.spec).value
            b = self.b_nodes[0] + integrate_interval(self.singular, r, float(self.grid[0]), self.spec).value
            return a, b
        j = int(np.searchsorted(self.grid, r, side='right')) - 1
        node = float(self.grid[j])
        if r == node:
            return float(self.a_nodes[j]), float(self.b_nodes[j])
        a = self.a_nodes[j] + integrate_interval(self.regular, node, r, self.spec).value
        b = self.b_nodes[j] - integrate_interval(self.singular, node, r, self.spec).value
        return float(a), float(b)


@dataclass
class GreenSolution:
    """
    u = k Phi + u_p + boundary_coeff Gamma on (0, R].

    Callable on scalars or arrays; ``profile`` exposes u as a RadialProfile
    with exact first and second derivatives.
    """
    params: OperatorParams
    k: float
    boundary_coeff: float
    particular: RadialProfile
    grid: np.ndarray
    values: np.ndarray
    R: float
    gate: GateResult
    source: SourceTerm
    resonance: Optional[str] = None
    asymptotics_hypothesis: bool = True
    converged: bool = True
    _phi: RadialProfile = field(default=None, repr=False)
    _gamma: RadialProfile = field(default=None, repr=False)

    def __call__(self, r):
        r_arr = np.asarray(r, dtype=float)
        out = self.k * self._phi.eval(r_arr) + self.particular.eval(r_arr) + self.boundary_coeff * self._gamma.eval(r_arr)
        return out if out.ndim else float(out)

    def derivative(self, r):
        r_arr = np.asarray(r, dtype=float)
        out = self.k * self._phi.d1(r_arr) + self.particular.d1(r_arr) + self.boundary_coeff * self._gamma.d1(r_arr)
        return out if out.ndim else float(out)

    def second_derivative(self, r):
        r_arr = np.asarray(r, dtype=float)
        out = self.k * self._phi.d2(r_arr) + self.particular.d2(r_arr) + self.boundary_coeff * self._gamma.d2(r_arr)
        return out if out.ndim else float(out)

    @property
    def profile(self) -> RadialProfile:
        return RadialProfile(self.__call__, self.derivative, self.second_derivative, support_radius=self.R, name="green")

    def asymptote_radii(self, count: int = 21, first: int = 20) -> np.ndarray:
        """Geometric radii R 2^-i, i = first .. first+count-1, for singular_coefficient"""
        return self.R * 0.5 ** np.arange(first, first + count, dtype=float)


def _vectorize(fn: Callable) -> Callable:
    def wrapped(r):
        r_arr = np.asarray(r, dtype=float)
        out = np.array([fn(float(x)) for x in r_arr.ravel()]).reshape(r_arr.shape)
        return out if out.ndim else float(out)
    return wrapped


def green_solve(params: OperatorParams, f: SourceTerm, R: float = 1.0, k: float = 0.0,
                spec: QuadratureSpec = None) -> GreenSolution:
    """
    Solve L u = f in B_R minus the origin with singular coefficient k and u(R) = 0.

    Raises:
        NonexistenceError: inadmissible parameters, or f not in L^1(d gamma)
        DomainError: critical regime with R > 1
        GateDisagreementError: inconsistent theta_hint
    """
    spec = spec or QuadratureSpec()
    if not params.admissible:
        raise NonexistenceError(
            "no nonnegative solution: the operator is inadmissible (negative discriminant)",
            reason="inadmissible", context=params.to_dict())
    if params.regime is Regime.CRITICAL and R > 1.0:
        raise DomainError("critical regime requires R <= 1 (Phi changes sign at r = 1)", {'R': R})

    gate = weighted_l1_gate(params, f, R, spec)
    if not gate.integrable:
        raise NonexistenceError(
            "no nonnegative solution: the source is not integrable against d(gamma)",
            reason="divergent_source", context={**params.to_dict(), 'analytic_margin': gate.analytic_margin})

    data = exponent_data(params)
    wronskian = data.wronskian
    phi, gamma = fundamental_profiles(params)
    nodes = _NodeIntegrals(params, f, R, spec, phi, gamma)

    def u_p(r):
        a, b = nodes.at(r)
        return (phi.eval(r) * a + gamma.eval(r) * b) / wronskian

    def du_p(r):
        a, b = nodes.at(r)
        return (phi.d1(r) * a + gamma.d1(r) * b) / wronskian

    def d2u_p(r):
        # A' Phi' + B' Gamma' survives the second differentiation
        a, b = nodes.at(r)
        jump = (phi.d1(r) * gamma.eval(r) - gamma.d1(r) * phi.eval(r)) * r ** nodes.weight * f(r)
        return (phi.d2(r) * a + gamma.d2(r) * b + jump) / wronskian

    particular = RadialProfile(_vectorize(u_p), _vectorize(du_p), _vectorize(d2u_p), support_radius=R, name="u_p")
    boundary_coeff = -(k * phi.eval(R) + u_p(R)) / gamma.eval(R)

    resonance = None
    if f.power_law is not None:
        resonance = closed_form_particular(params, f.power_law[0])[1]
    hypothesis = f.theta_hint + 2.0 - data.tau_minus > 0.0

    solution = GreenSolution(
        params=params, k=k, boundary_coeff=float(boundary_coeff), particular=particular,
        grid=nodes.grid, values=np.empty(0), R=R, gate=gate, source=f, resonance=resonance,
        asymptotics_hypothesis=hypothesis, converged=nodes.converged, _phi=phi, _gamma=gamma,
    )
    solution.values = np.asarray(solution(nodes.grid))
    if not nodes.converged:
        logger.warning("green_solve: some node integrals did not reach tolerance")
    logger.debug(f"green_solve: k={k:g}, boundary_coeff={boundary_coeff:.12g}, resonance={resonance}")
    return solution


# =====================================================
# ASYMPTOTICS, VERIFICATION, COMPARISON
# =====================================================

class AsymptoteEstimate(NamedTuple):
    k: float
    order: Optional[float]
    error_estimate: float


def singular_coefficient(params: OperatorParams, radii: Sequence[float], values: Sequence[float]) -> AsymptoteEstimate:
    """
    Extrapolate k = lim u(r) r^(-tau_-), or lim u(r) / (r^tau_0 (-ln r)) when critical.

    ``radii`` must be geometric and decreasing. Subcritical samples get an
    Aitken step on the last three scaled values and an observed order from the
    contraction of successive differences; critical samples are fit by least
    squares on {1, 1/(-ln r)}.

    Raises:
        AsymptoteError: the scaled sequence does not contract
    """
    discrepancies.flag("singular-limit-normalization")
    r = np.asarray(radii, dtype=float)
    u = np.asarray(values, dtype=float)
    if r.size < 4 or r.size != u.size:
        raise ValidationError("singular_coefficient needs at least four matching samples")
    data = exponent_data(params)

    if params.regime is Regime.CRITICAL:
        logs = -np.log(r)
        scaled = u / (np.power(r, data.tau_zero) * logs)
        basis = np.stack([np.ones_like(logs), 1.0 / logs], axis=-1)
        coeffs = np.linalg.lstsq(basis, scaled, rcond=None)[0]
        half = r.size // 2
        inner = np.linalg.lstsq(basis[half:], scaled[half:], rcond=None)[0]
        spread = abs(coeffs[0] - inner[0])
        if spread > 1e-3 * max(1.0, abs(inner[0])):
            raise AsymptoteError("no clean tau_0 asymptote: fits over nested ranges disagree",
                                 context={'k_all': float(coeffs[0]), 'k_inner': float(inner[0])})
        return AsymptoteEstimate(float(inner[0]), None, float(spread))

    scaled = u * np.power(r, -data.tau_minus)
    d_prev = scaled[-2] - scaled[-3]
    d_last = scaled[-1] - scaled[-2]
    floor = 1e-13 * max(1.0, abs(scaled[-1]))
    if abs(d_last) <= floor:
        return AsymptoteEstimate(float(scaled[-1]), None, float(abs(d_last)))
    ratio = d_last / d_prev if d_prev != 0.0 else math.inf
    if not 0.0 < ratio < 1.0:
        raise AsymptoteError("no clean tau_- asymptote: scaled samples do not contract",
                             context={'ratio': float(ratio), 'last': float(scaled[-1])})

    k = scaled[-1] + d_last * ratio / (1.0 - ratio)
    order = math.log(ratio) / math.log(r[-1] / r[-2])
    return AsymptoteEstimate(float(k), float(order), float(abs(k - scaled[-1])))


def solution_coefficient(solution: GreenSolution, count: int = 21) -> AsymptoteEstimate:
    radii = solution.asymptote_radii(count)
    return singular_coefficient(solution.params, radii, solution(radii))


def verify_solution(params: OperatorParams, u, f, r_lo: float, r_hi: float, points: int = 64) -> float:
    """max |L u - f| over a geometric grid of [r_lo, r_hi]; u is a RadialProfile or a GreenSolution."""
    if not 0 < r_lo < r_hi:
        raise DomainError("verify_solution needs 0 < r_lo < r_hi", {'r_lo': r_lo, 'r_hi': r_hi})
    profile = u.profile if isinstance(u, GreenSolution) else u
    radii = np.geomspace(r_lo, r_hi, points)
    residual = np.asarray(apply_radial(params, profile, radii)) - np.asarray(f(radii))
    return float(np.max(np.abs(residual)))


@dataclass(frozen=True)
class ComparisonReport:
    ordered: bool
    max_violation: float
    worst_radius: Optional[float]
    points: int

    def to_dict(self) -> dict:
        return {
            'ordered': self.ordered,
            'max_violation': self.max_violation,
            'worst_radius': self.worst_radius,
            'points': self.points,
        }


def comparison_check(params: OperatorParams, u1, u2, grid: Sequence[float], tolerance: float = 1e-9) -> ComparisonReport:
    """
    Report whether u1 <= u2 on the grid, up to tolerance * max(1, |u2|).

    u1 and u2 are callables or sample arrays aligned with ``grid``.
    """
    radii = np.asarray(grid, dtype=float)
    v1 = np.asarray(u1(radii) if callable(u1) else u1, dtype=float)
    v2 = np.asarray(u2(radii) if callable(u2) else u2, dtype=float)
    excess = v1 - v2 - tolerance * np.maximum(1.0, np.abs(v2))
    worst = int(np.argmax(excess))
    ordered = bool(excess[worst] <= 0.0)
    if not ordered:
        logger.info(f"comparison violated at r={radii[worst]:.6g} for {params.to_dict()}")
    return ComparisonReport(ordered, float(max(0.0, v1[worst] - v2[worst])),
                            None if ordered else float(radii[worst]), int(radii.size))


def hardy_round_trip(params: OperatorParams, f: SourceTerm, R: float = 1.0, k: float = 0.0,
                     spec: QuadratureSpec = None, radii: Sequence[float] = None) -> Dict[str, float]:
    """
    Solve directly and through the reduced Hardy problem (mu~, r^(-mu1/2) f), mapped back by r^(mu1/2).

    Returns the maximum relative difference on ``radii`` (default [R/100, R/2]).
    """
    shift = params.mu1 / 2.0
    reduction = hardy_reduction(params)
    direct = green_solve(params, f, R, k, spec)
    reduced = green_solve(reduction.reduced, f.scaled_by_power(-shift), R, k, spec)
    radii = np.geomspace(R / 100.0, R / 2.0, 25) if radii is None else np.asarray(radii, dtype=float)
    u_direct = np.asarray(direct(radii))
    u_mapped = np.power(radii, shift) * np.asarray(reduced(radii))
    scale = np.maximum(np.abs(u_direct), 1e-300)
    return {
        'mu_tilde': reduction.mu_tilde,
        'max_relative_difference': float(np.max(np.abs(u_direct - u_mapped) / scale)),
        'boundary_coeff_direct': direct.boundary_coeff,
        'boundary_coeff_reduced': reduced.boundary_coeff,
    }


def solution_table(solution: GreenSolution, radii: Sequence[float] = None) -> List[Dict[str, float]]:
    """Rows (r, u, residual) for CSV export; residual is L u - f from the exact derivatives."""
    if radii is None:
        radii = solution.grid[(solution.grid >= solution.R / 100.0) & (solution.grid < solution.R)]
    radii = np.asarray(radii, dtype=float)
    residual = np.asarray(apply_radial(solution.params, solution.profile, radii)) - np.asarray(solution.source(radii))
    values = np.asarray(solution(radii))
    return [{'r': float(r), 'u': float(u), 'residual': float(e)} for r, u, e in zip(radii, values, residual)]


def solution_summary(solution: GreenSolution) -> dict:
    return {
        'k': solution.k,
        'boundary_coeff': solution.boundary_coeff,
        'gate': solution.gate.to_dict(),
        'regime': solution.params.regime.value,
        'resonance': solution.resonance,
        'asymptotics_hypothesis': solution.asymptotics_hypothesis,
        'converged': solution.converged,
    }
