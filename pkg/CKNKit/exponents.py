"""
Parameter calculus for the CKN operator L = -Delta + mu1 x.grad/|x|^2 + mu2/|x|^2
Copyright (c) 2025 Arjun-M/CKNKit

Admissibility classification, characteristic exponents tau_pm, the indicial
polynomial c(tau) = -tau (N - 2 - mu1 + tau) + mu2, the identity constant, the
Hardy reduction and the Serrin-type critical exponents.
"""

import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy import special

from . import discrepancies
from .exceptions import DomainError, InadmissibleParametersError, NoSerrinExponentError

logger = logging.getLogger(__name__)

CRITICAL_TOLERANCE = 1e-12


class Regime(str, Enum):
    """Admissibility regime, decided by the sign of the discriminant"""
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    INADMISSIBLE = "Inadmissible"


def _discriminant(N: float, mu1: float, mu2: float) -> float:
    b = 2.0 - N + mu1
    return b * b + 4.0 * mu2


def _regime_of(N: float, mu1: float, discriminant: float) -> Regime:
    b = 2.0 - N + mu1
    if abs(discriminant) <= CRITICAL_TOLERANCE * max(1.0, b * b):
        return Regime.CRITICAL
    return Regime.SUBCRITICAL if discriminant > 0 else Regime.INADMISSIBLE


@dataclass(frozen=True)
class OperatorParams:
    """
    Parameters (N, mu1, mu2) of the operator.

    The discriminant and the regime are computed once at construction.
    ``forced_regime`` overrides the tolerance-based classification for
    boundary studies.

    Example:
        params = OperatorParams(3, 0.0, -0.2)
        params.regime        # Regime.SUBCRITICAL
    """
    N: float
    mu1: float
    mu2: float
    forced_regime: Optional[Regime] = None
    discriminant: float = field(init=False, repr=False, compare=False)
    regime: Regime = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.N) or not math.isfinite(self.mu1) or not math.isfinite(self.mu2):
            raise DomainError("N, mu1 and mu2 must be finite", {'N': self.N, 'mu1': self.mu1, 'mu2': self.mu2})
        if self.N < 2:
            raise DomainError(f"dimension must satisfy N >= 2 (got N={self.N})", {'N': self.N})
        disc = _discriminant(self.N, self.mu1, self.mu2)
        object.__setattr__(self, 'discriminant', disc)
        object.__setattr__(self, 'regime', self.forced_regime or _regime_of(self.N, self.mu1, disc))

    @property
    def admissible(self) -> bool:
        return self.regime is not Regime.INADMISSIBLE

    @property
    def drift_exponent(self) -> float:
        """b = N - 1 - mu1, the coefficient of u'/r in the radial operator"""
        return self.N - 1.0 - self.mu1

    def with_mu2(self, mu2: float) -> "OperatorParams":
        return OperatorParams(self.N, self.mu1, mu2)

    def to_dict(self) -> dict:
        return {'N': self.N, 'mu1': self.mu1, 'mu2': self.mu2, 'regime': self.regime.value}


@dataclass(frozen=True)
class ExponentData:
    """Characteristic exponents and the identity constant"""
    tau_minus: float
    tau_plus: float
    tau_zero: float
    discriminant: float
    c_const: float
    sphere_area: float

    @property
    def wronskian(self) -> float:
        """tau_+ - tau_- in the subcritical regime, 1 in the critical one (c_const / |S^{N-1}|)"""
        return self.c_const / self.sphere_area

    def to_dict(self) -> dict:
        return {
            'tau_minus': self.tau_minus,
            'tau_plus': self.tau_plus,
            'tau_zero': self.tau_zero,
            'discriminant': self.discriminant,
            'c_const': self.c_const,
            'sphere_area': self.sphere_area,
        }


class HardyReduction(NamedTuple):
    mu_tilde: float
    exponent_shift: float
    reduced: OperatorParams


class CriticalExponents(NamedTuple):
    p_sharp: float
    q_sharp: float
    q_sharp_measure: float


def classify_params(N: float, mu1: float, mu2: float) -> Regime:
    """Subcritical / Critical / Inadmissible by the sign of (2-N+mu1)^2 + 4 mu2."""
    return OperatorParams(N, mu1, mu2).regime


def sphere_area(N: float) -> float:
    """|S^{N-1}| = 2 pi^{N/2} / Gamma(N/2); real N is accepted."""
    return float(2.0 * math.pi ** (N / 2.0) / special.gamma(N / 2.0))


def _roots(params: OperatorParams):
    b = 2.0 - params.N + params.mu1
    if params.regime is Regime.CRITICAL:
        t0 = b / 2.0
        return t0, t0
    s = math.sqrt(params.discriminant)
    # q carries the sign of b so the sum never cancels; the other root follows from tau_- tau_+ = -mu2
    q = (b + math.copysign(s, b)) / 2.0
    if q == 0.0:
        return 0.0, 0.0
    other = -params.mu2 / q
    return min(q, other), max(q, other)


def exponent_data(params: OperatorParams) -> ExponentData:
    """
    Characteristic exponents tau_-, tau_0, tau_+ and the identity constant.

    Raises:
        InadmissibleParametersError: negative discriminant
    """
    if not params.admissible:
        raise InadmissibleParametersError(context=params.to_dict())

    tau_minus, tau_plus = _roots(params)
    area = sphere_area(params.N)
    if params.regime is Regime.CRITICAL:
        tau_zero = tau_minus
        c_const = area
    else:
        tau_zero = (2.0 - params.N + params.mu1) / 2.0
        c_const = math.sqrt(params.discriminant) * area

    if params.mu2 == 0.0 and params.mu1 < params.N - 2 and params.regime is Regime.SUBCRITICAL:
        discrepancies.flag("log-fundamental-remark")

    return ExponentData(tau_minus, tau_plus, tau_zero, params.discriminant, c_const, area)


def indicial(params: OperatorParams, tau):
    """c(tau) = -tau (N - 2 - mu1 + tau) + mu2; works on scalars and arrays."""
    return -tau * (params.N - 2.0 - params.mu1 + tau) + params.mu2


def indicial_derivative(params: OperatorParams, tau):
    """c'(tau) = -2 tau - (N - 2 - mu1)"""
    return -2.0 * tau - (params.N - 2.0 - params.mu1)


def hardy_reduction(params: OperatorParams) -> HardyReduction:
    """
    Substitution u = |x|^{mu1/2} v turning L_{mu1,mu2} into -Delta + mu~/|x|^2.

    mu~ = mu2 + mu1^2/4 - (mu1/2)(N-2) and tau_pm(mu~) = tau_pm(mu1, mu2) - mu1/2.
    """
    discrepancies.flag("hardy-shift-sign")
    mu_tilde = params.mu2 + params.mu1 ** 2 / 4.0 - params.mu1 / 2.0 * (params.N - 2.0)
    forced = params.forced_regime
    reduced = OperatorParams(params.N, 0.0, mu_tilde, forced_regime=forced or params.regime)
    return HardyReduction(mu_tilde, -params.mu1 / 2.0, reduced)


def critical_exponents(params: OperatorParams, theta: float) -> CriticalExponents:
    """
    Serrin-type exponents for the Lane-Emden inequality L u >= Q u^p, Q ~ |x|^theta.

    Returns p_sharp = 1 + (2+theta)/(-tau_+), q_sharp = (N+theta)/(-tau_+) - 1 and
    the weight-consistent q_sharp_measure = (N-mu1+theta)/(-tau_+) - 1.

    Raises:
        DomainError: theta <= -2
        NoSerrinExponentError: tau_+ >= 0
    """
    if theta <= -2.0:
        raise DomainError(f"potential exponent must satisfy theta > -2 (got {theta})", {'theta': theta})
    data = exponent_data(params)
    if data.tau_plus >= 0.0:
        raise NoSerrinExponentError(context={**params.to_dict(), 'tau_plus': data.tau_plus})

    discrepancies.flag("q-sharp-measure")
    neg = -data.tau_plus
    p_sharp = 1.0 + (2.0 + theta) / neg
    q_sharp = (params.N + theta) / neg - 1.0
    q_sharp_measure = (params.N - params.mu1 + theta) / neg - 1.0
    return CriticalExponents(p_sharp, q_sharp, q_sharp_measure)


def tau_plus_of(N: float, mu1: float, mu2) -> np.ndarray:
    """Vectorized tau_+(mu1, mu2) on the admissible range, for grid studies."""
    b = 2.0 - N + mu1
    disc = np.maximum(b * b + 4.0 * np.asarray(mu2, dtype=float), 0.0)
    return (b + np.sqrt(disc)) / 2.0
