"""
Liouville nonexistence engine for L u >= Q u^p, Q(x) >= q0 |x|^theta
Copyright (c) 2025 Arjun-M/CKNKit

Given a positive supersolution, u >= d_j r^tau_j near the origin improves to
u >= d_{j+1} r^tau_{j+1} with tau_{j+1} = p tau_j + theta + 2 by comparison
with the barrier r^tau - r0^(tau - tau_+) r^tau_+. The iteration starts at
tau_0 = tau_+ and stops once p tau_j + theta + 2 <= tau_-, where the source
q0 d_j^p r^(theta + p tau_j) is no longer integrable against d(gamma) and the
Poisson problem has no nonnegative solution.

Example:
    params = OperatorParams(3, 0.0, -0.2)
    trace = bootstrap(params, theta=0.0, p=9.0)
    trace.case_tag          # CaseTag.PART2
    certificate(trace)      # replayable JSON payload
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional

import numpy as np

from . import discrepancies
from .exponents import (
    OperatorParams,
    Regime,
    critical_exponents,
    exponent_data,
    indicial,
)
from .exceptions import (
    ConvergenceError,
    DomainError,
    HypothesisError,
    NonexistenceError,
    NoSerrinExponentError,
    ValidationError,
)
from .operator import RadialProfile
from .poisson import SourceTerm, green_solve
from .quadrature import QuadratureSpec

logger = logging.getLogger(__name__)

P_SHARP_TOLERANCE = 1e-12
MAX_BOOTSTRAP_STEPS = 10_000


class CaseTag(str, Enum):
    PART1 = "Part1_Supercritical"
    PART2 = "Part2_Bootstrap"
    PART3 = "Part3_CriticalShift"
    INCONCLUSIVE = "Inconclusive"


class Termination(str, Enum):
    DIVERGENT_MASS = "DivergentMass"
    INADMISSIBLE_SHIFT = "InadmissibleShift"
    BELOW_P_SHARP = "BelowPSharp"


@dataclass
class LiouvilleTrace:
    """
    Record of one bootstrap run.

    ``divergence_exponent`` is theta + p tau_last + tau_+ - mu1 + N, the
    d(gamma)-mass exponent of the last source (<= 0 for DivergentMass).
    ``shifted`` holds the trace of the shifted problem for Part3.
    """
    params: OperatorParams
    p: float
    theta: float
    q0: float
    case_tag: CaseTag
    termination: Termination
    p_sharp: float
    q_sharp: float
    q_sharp_measure: float
    tau_sequence: List[float] = field(default_factory=list)
    d_sequence: List[float] = field(default_factory=list)
    sigma0: Optional[float] = None
    divergence_exponent: Optional[float] = None
    shifted: Optional["LiouvilleTrace"] = None

    @property
    def nonexistent(self) -> bool:
        return self.case_tag is not CaseTag.INCONCLUSIVE

    @property
    def verdict(self) -> str:
        return "Nonexistent" if self.nonexistent else "Inconclusive"

    def __len__(self) -> int:
        return len(self.tau_sequence)


class Barrier(NamedTuple):
    """w(r) = r^tau - r0^(tau - tau_+) r^tau_+ with L w = c(tau) r^(tau-2)"""
    profile: RadialProfile
    indicial_value: float
    r0: float
    lower_ratio: float


class StepWitness(NamedTuple):
    tau_next: float
    d_next: float
    contradiction: bool
    dominated: bool
    min_margin: Optional[float]
    min_relative_margin: Optional[float]
    radii: List[float]
    margins: List[float]

    def to_dict(self) -> dict:
        return self._asdict()


def barrier(params: OperatorParams, tau: float, r0: float = 1.0) -> Barrier:
    """
    Subsolution barrier vanishing on |x| = r0.

    ``lower_ratio`` is inf over (0, r0/2] of w(r)/r^tau = 1 - 2^(tau - tau_+).

    Raises:
        DomainError: tau outside (tau_-, tau_+), where c(tau) <= 0
    """
    data = exponent_data(params)
    if not data.tau_minus < tau < data.tau_plus:
        raise DomainError(f"barrier exponent must lie in (tau_-, tau_+) = ({data.tau_minus:.6g}, {data.tau_plus:.6g})",
                          {'tau': tau})
    if not r0 > 0:
        raise DomainError("barrier radius must be positive", {'r0': r0})

    tp = data.tau_plus
    scale = r0 ** (tau - tp)
    profile = RadialProfile(
        lambda r: np.power(r, tau) - scale * np.power(r, tp),
        lambda r: tau * np.power(r, tau - 1.0) - scale * tp * np.power(r, tp - 1.0),
        lambda r: tau * (tau - 1.0) * np.power(r, tau - 2.0) - scale * tp * (tp - 1.0) * np.power(r, tp - 2.0),
        support_radius=r0,
        name=f"barrier({tau:g})",
    )
    return Barrier(profile, float(indicial(params, tau)), r0, 1.0 - 2.0 ** (tau - tp))


def lower_bound_step(params: OperatorParams, theta: float, p: float, q0: float,
                     tau_j: float, d_j: float, r0: float = 1.0):
    """
    One bootstrap step: (tau_next, d_next) with tau_next = p tau_j + theta + 2 and

        d_next = q0 d_j^p (1 - 2^(tau_next - tau_+)) / c(tau_next).

    The constant does not depend on r0 (the operator is scale invariant).

    Raises:
        DomainError: tau_next outside (tau_-, tau_+); the caller runs the termination test
    """
    # d_j may underflow to 0 on long traces; the exponents stay exact
    if d_j < 0:
        raise ValidationError("lower-bound constant must be nonnegative", context={'d_j': d_j})
    tau_next = p * tau_j + theta + 2.0
    b = barrier(params, tau_next, r0)
    d_next = q0 * d_j ** p * b.lower_ratio / b.indicial_value
    return tau_next, d_next


def _initial_constant(tau_plus: float) -> float:
    """d_0 = t_1 (1 - 2^tau_+) with the boundary minimum t_1 normalized to 1"""
    return 1.0 - 2.0 ** tau_plus


def _divergence_exponent(params: OperatorParams, theta: float, p: float, tau_last: float, tau_plus: float) -> float:
    return theta + p * tau_last + tau_plus - params.mu1 + params.N


def bootstrap(params: OperatorParams, theta: float, p: float, q0: float = 1.0) -> LiouvilleTrace:
    """
    Run the nonexistence argument for (params, theta, p, q0).

    Dispatch: p < p_sharp -> Inconclusive; p = p_sharp (relative 1e-12) ->
    Part3 shift; p >= q_sharp_measure -> Part1; otherwise Part2 iteration.

    Raises:
        NoSerrinExponentError: tau_+ >= 0 (exponent gate undefined)
        DomainError: theta <= -2 or p <= 0
    """
    if not p > 0:
        raise DomainError("exponent p must be positive", {'p': p})
    if not q0 > 0:
        raise ValidationError("potential constant q0 must be positive", context={'q0': q0})
    data = exponent_data(params)
    if data.tau_plus >= 0.0:
        raise NoSerrinExponentError("exponent gate undefined: tau_+ >= 0", context=params.to_dict())
    crit = critical_exponents(params, theta)
    discrepancies.flag("termination-test")

    tp, tm = data.tau_plus, data.tau_minus
    d0 = _initial_constant(tp)
    trace = LiouvilleTrace(
        params=params, p=p, theta=theta, q0=q0,
        case_tag=CaseTag.INCONCLUSIVE, termination=Termination.BELOW_P_SHARP,
        p_sharp=crit.p_sharp, q_sharp=crit.q_sharp, q_sharp_measure=crit.q_sharp_measure,
    )

    at_p_sharp = abs(p - crit.p_sharp) <= P_SHARP_TOLERANCE * max(1.0, crit.p_sharp)
    if p < crit.p_sharp and not at_p_sharp:
        logger.info(f"p={p:g} below p_sharp={crit.p_sharp:.6g}: inconclusive")
        return trace

    if at_p_sharp:
        return _critical_shift(trace, d0)

    trace.tau_sequence = [tp]
    trace.d_sequence = [d0]
    if p >= crit.q_sharp_measure:
        trace.case_tag = CaseTag.PART1
    else:
        trace.case_tag = CaseTag.PART2
        for _ in range(MAX_BOOTSTRAP_STEPS):
            tau_j = trace.tau_sequence[-1]
            if p * tau_j + theta + 2.0 <= tm:
                break
            tau_next, d_next = lower_bound_step(params, theta, p, q0, tau_j, trace.d_sequence[-1])
            trace.tau_sequence.append(tau_next)
            trace.d_sequence.append(d_next)
        else:
            raise ConvergenceError("bootstrap did not terminate", context={'p': p, 'theta': theta})

    trace.termination = Termination.DIVERGENT_MASS
    trace.divergence_exponent = _divergence_exponent(params, theta, p, trace.tau_sequence[-1], tp)
    logger.info(f"{trace.case_tag.value}: {len(trace)} exponents, divergence exponent {trace.divergence_exponent:.6g}")
    return trace


def _critical_shift(trace: LiouvilleTrace, d0: float) -> LiouvilleTrace:
    """p = p_sharp: shift mu2 by sigma0 = q0 d0^(p-1)/2 and rerun with q0/2."""
    params = trace.params
    trace.case_tag = CaseTag.PART3
    trace.sigma0 = trace.q0 * d0 ** (trace.p - 1.0) / 2.0
    shifted = params.with_mu2(params.mu2 - trace.sigma0)

    if not shifted.admissible:
        if params.regime is Regime.CRITICAL:
            discrepancies.flag("critical-shift-admissibility")
        trace.termination = Termination.INADMISSIBLE_SHIFT
        trace.tau_sequence = [exponent_data(params).tau_plus]
        trace.d_sequence = [d0]
        logger.info(f"Part3: shifted mu2={shifted.mu2:.6g} inadmissible")
        return trace

    sub = bootstrap(shifted, trace.theta, trace.p, trace.q0 / 2.0)
    trace.shifted = sub
    trace.termination = sub.termination
    trace.tau_sequence = list(sub.tau_sequence)
    trace.d_sequence = list(sub.d_sequence)
    trace.divergence_exponent = sub.divergence_exponent
    logger.info(f"Part3: shifted problem ended in {sub.case_tag.value}")
    return trace


def check_hypotheses(params: OperatorParams) -> None:
    """
    Raises:
        HypothesisError: N < 3, mu1 >= N-2, mu2 >= 0, or mu2 below the admissibility bound
    """
    if params.N < 3:
        raise HypothesisError(f"dimension must satisfy N >= 3 (got {params.N})", "dimension")
    if not params.mu1 < params.N - 2:
        raise HypothesisError(f"drift must satisfy mu1 < N - 2 (got {params.mu1})", "drift")
    if not params.mu2 < 0:
        raise HypothesisError(f"potential must satisfy mu2 < 0 (got {params.mu2})", "potential_sign")
    if not params.admissible:
        bound = -((params.N - 2.0 - params.mu1) ** 2) / 4.0
        raise HypothesisError(f"potential must satisfy mu2 >= {bound:.6g} (got {params.mu2})", "admissibility")


@dataclass(frozen=True)
class LiouvilleVerdict:
    verdict: str
    trace: LiouvilleTrace
    certificate: Dict[str, Any]

    def to_dict(self) -> dict:
        return {'verdict': self.verdict, 'certificate': self.certificate}


def liouville_verdict(params: OperatorParams, theta: float, p: float, q0: float = 1.0) -> LiouvilleVerdict:
    """Check the hypotheses, bootstrap, and wrap the trace into a certificate."""
    check_hypotheses(params)
    trace = bootstrap(params, theta, p, q0)
    return LiouvilleVerdict(trace.verdict, trace, certificate(trace))


# =====================================================
# NUMERIC WITNESS
# =====================================================

def numeric_step_witness(params: OperatorParams, theta: float, p: float, q0: float, tau_j: float, d_j: float,
                         R: float = 0.5, spec: QuadratureSpec = None, samples: int = 24) -> StepWitness:
    """
    Solve L u = q0 d_j^p r^(theta + p tau_j) on B_R with k = 0 and measure u - d_next r^tau_next.

    Margins are sampled on a geometric grid strictly inside (0, R/2), the
    exact solution touching the bound at R/2. A divergent source gate is the
    contradiction that ends the iteration.
    """
    data = exponent_data(params)
    tau_next = p * tau_j + theta + 2.0
    source = SourceTerm.power(theta + p * tau_j, q0 * d_j ** p)
    try:
        solution = green_solve(params, source, R, 0.0, spec)
    except NonexistenceError as exc:
        logger.info(f"step witness: source at tau_j={tau_j:.6g} diverges, contradiction ({exc.reason})")
        return StepWitness(tau_next, 0.0, True, False, None, None, [], [])

    d_next = q0 * d_j ** p * (1.0 - 2.0 ** (tau_next - data.tau_plus)) / float(indicial(params, tau_next))
    radii = (R / 2.0) * 0.7 ** np.arange(1, samples + 1, dtype=float)
    bound = d_next * np.power(radii, tau_next)
    margins = np.asarray(solution(radii)) - bound
    scale = np.where(bound > 0, bound, 1.0)
    relative = margins / scale
    dominated = bool(np.all(margins > 0)) if d_next > 0 else bool(np.all(margins >= -1e-300))
    return StepWitness(tau_next, d_next, False, dominated, float(np.min(margins)), float(np.min(relative)),
                       radii.tolist(), margins.tolist())


def witness_trace(trace: LiouvilleTrace, R: float = 0.5, spec: QuadratureSpec = None) -> List[StepWitness]:
    """numeric_step_witness for every exponent of a trace (the last one witnesses the contradiction)"""
    source = trace.shifted if trace.shifted is not None else trace
    return [
        numeric_step_witness(source.params, source.theta, source.p, source.q0, tau, d, R, spec)
        for tau, d in zip(source.tau_sequence, source.d_sequence)
    ]


# =====================================================
# CERTIFICATES
# =====================================================

def _canonical(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(',', ':'), ensure_ascii=True, allow_nan=False)


def certificate(trace: LiouvilleTrace) -> Dict[str, Any]:
    """JSON-ready certificate with a SHA-256 ``replay_hash`` of its canonical form."""
    data = exponent_data(trace.params)
    payload = {
        'params': {'N': trace.params.N, 'mu1': trace.params.mu1, 'mu2': trace.params.mu2},
        'regime': trace.params.regime.value,
        'theta': trace.theta,
        'p': trace.p,
        'q0': trace.q0,
        'case_tag': trace.case_tag.value,
        'termination': trace.termination.value,
        'tau_minus': data.tau_minus,
        'tau_plus': data.tau_plus,
        'p_sharp': trace.p_sharp,
        'q_sharp': trace.q_sharp,
        'q_sharp_measure': trace.q_sharp_measure,
        'tau_sequence': list(trace.tau_sequence),
        'd_sequence': list(trace.d_sequence),
        'sigma0': trace.sigma0,
        'divergence_exponent': trace.divergence_exponent,
        'shifted': certificate(trace.shifted) if trace.shifted is not None else None,
    }
    payload['replay_hash'] = hashlib.sha256(_canonical(payload).encode('utf-8')).hexdigest()
    return payload


class ReplayResult(NamedTuple):
    valid: bool
    failures: List[str]


def _close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def replay_certificate(cert: Dict[str, Any], rel_tol: float = 1e-10) -> ReplayResult:
    """
    Re-derive every exponent, constant and the termination of a certificate.

    Uses the exponents module only; never trusts the stored sequences beyond
    their first entry.
    """
    failures: List[str] = []
    body = {key: value for key, value in cert.items() if key != 'replay_hash'}
    if hashlib.sha256(_canonical(body).encode('utf-8')).hexdigest() != cert.get('replay_hash'):
        failures.append("replay_hash mismatch")

    params = OperatorParams(**cert['params'])
    theta, p, q0 = cert['theta'], cert['p'], cert['q0']
    data = exponent_data(params)
    crit = critical_exponents(params, theta)
    tp, tm = data.tau_plus, data.tau_minus

    for key, value in (('tau_minus', tm), ('tau_plus', tp), ('p_sharp', crit.p_sharp),
                       ('q_sharp', crit.q_sharp), ('q_sharp_measure', crit.q_sharp_measure)):
        if not _close(cert[key], value, rel_tol):
            failures.append(f"{key}: stored {cert[key]!r}, recomputed {value!r}")

    tag = cert['case_tag']
    at_p_sharp = abs(p - crit.p_sharp) <= P_SHARP_TOLERANCE * max(1.0, crit.p_sharp)
    if at_p_sharp:
        expected_tag = CaseTag.PART3.value
    elif p < crit.p_sharp:
        expected_tag = CaseTag.INCONCLUSIVE.value
    elif p >= crit.q_sharp_measure:
        expected_tag = CaseTag.PART1.value
    else:
        expected_tag = CaseTag.PART2.value
    if tag != expected_tag:
        failures.append(f"case_tag: stored {tag}, dispatch gives {expected_tag}")

    if tag == CaseTag.PART3.value:
        d0 = _initial_constant(tp)
        sigma0 = q0 * d0 ** (p - 1.0) / 2.0
        if cert['sigma0'] is None or not _close(cert['sigma0'], sigma0, rel_tol):
            failures.append("sigma0 does not match q0 d0^(p-1)/2")
        shifted = OperatorParams(params.N, params.mu1, params.mu2 - sigma0)
        if cert['termination'] == Termination.INADMISSIBLE_SHIFT.value:
            if shifted.admissible:
                failures.append("shifted parameters are admissible but the certificate claims InadmissibleShift")
        elif cert['shifted'] is None:
            failures.append("Part3 certificate lacks the shifted trace")
        else:
            if not _close(cert['shifted']['params']['mu2'], shifted.mu2, rel_tol):
                failures.append("shifted mu2 does not match mu2 - sigma0")
            failures.extend(f"shifted: {msg}" for msg in replay_certificate(cert['shifted'], rel_tol).failures)
        return ReplayResult(not failures, failures)

    if tag == CaseTag.INCONCLUSIVE.value:
        return ReplayResult(not failures, failures)

    taus, ds = cert['tau_sequence'], cert['d_sequence']
    if not taus or not _close(taus[0], tp, rel_tol) or not _close(ds[0], _initial_constant(tp), rel_tol):
        failures.append("sequence does not start at (tau_+, 1 - 2^tau_+)")
        return ReplayResult(False, failures)

    tau, d = taus[0], ds[0]
    for j in range(1, len(taus)):
        tau_next = p * tau + theta + 2.0
        if not tm < tau_next < tp:
            failures.append(f"step {j}: exponent {tau_next!r} leaves (tau_-, tau_+)")
            break
        d_next = q0 * d ** p * (1.0 - 2.0 ** (tau_next - tp)) / float(indicial(params, tau_next))
        if not _close(taus[j], tau_next, rel_tol) or not _close(ds[j], d_next, rel_tol):
            failures.append(f"step {j}: stored ({taus[j]!r}, {ds[j]!r}), recomputed ({tau_next!r}, {d_next!r})")
        tau, d = tau_next, d_next

    if not p * tau + theta + 2.0 <= tm:
        failures.append("iteration has not reached the termination test p tau + theta + 2 <= tau_-")
    witness = theta + p * tau + tp - params.mu1 + params.N
    if witness > 1e-12 * max(1.0, abs(theta) + abs(p * tau) + params.N):
        failures.append(f"divergence witness exponent {witness!r} is positive")
    if cert['divergence_exponent'] is None or not _close(cert['divergence_exponent'], witness, rel_tol):
        failures.append("stored divergence exponent does not match")
    return ReplayResult(not failures, failures)
