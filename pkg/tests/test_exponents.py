import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import optimize

from CKNKit import discrepancies
from CKNKit.exceptions import DomainError, InadmissibleParametersError, NoSerrinExponentError
from CKNKit.exponents import (
    OperatorParams,
    Regime,
    classify_params,
    critical_exponents,
    exponent_data,
    hardy_reduction,
    indicial,
    sphere_area,
    tau_plus_of,
)


@pytest.mark.parametrize("N, mu1, mu2, regime", [
    (3, 0.0, 0.0, Regime.SUBCRITICAL),
    (2, 0.0, 0.0, Regime.CRITICAL),
    (3, 1.0, -1.0, Regime.INADMISSIBLE),
    (3, 0.0, -0.25, Regime.CRITICAL),
])
def test_classify_params(N, mu1, mu2, regime):
    assert classify_params(N, mu1, mu2) is regime


def test_dimension_below_two_is_a_domain_error():
    with pytest.raises(DomainError):
        OperatorParams(1.5, 0.0, 0.0)


def test_non_finite_parameters_rejected():
    with pytest.raises(DomainError):
        OperatorParams(3, math.nan, 0.0)


def test_newtonian_exponents(newtonian):
    data = exponent_data(newtonian)
    assert data.tau_minus == pytest.approx(-1.0, abs=1e-15)
    assert data.tau_plus == pytest.approx(0.0, abs=1e-15)
    assert data.c_const == pytest.approx(4.0 * math.pi, rel=1e-14)
    assert data.wronskian == pytest.approx(1.0)


def test_planar_exponents_are_critical(planar):
    data = exponent_data(planar)
    assert planar.regime is Regime.CRITICAL
    assert data.tau_zero == 0.0
    assert data.tau_minus == data.tau_plus == data.tau_zero
    assert data.c_const == pytest.approx(2.0 * math.pi, rel=1e-14)


def test_four_dimensional_drift_example():
    data = exponent_data(OperatorParams(4, 2.0, 1.0))
    assert data.tau_minus == pytest.approx(-1.0, abs=1e-14)
    assert data.tau_plus == pytest.approx(1.0, abs=1e-14)
    assert data.c_const == pytest.approx(2.0 * 2.0 * math.pi ** 2, rel=1e-14)


def test_roots_match_numeric_root_finder(serrin):
    data = exponent_data(serrin)
    lo = optimize.brentq(lambda t: indicial(serrin, t), -2.0, data.tau_zero)
    hi = optimize.brentq(lambda t: indicial(serrin, t), data.tau_zero, 1.0)
    assert data.tau_minus == pytest.approx(lo, abs=1e-12)
    assert data.tau_plus == pytest.approx(hi, abs=1e-12)


def test_inadmissible_has_no_real_exponents():
    with pytest.raises(InadmissibleParametersError, match="Inadmissible"):
        exponent_data(OperatorParams(3, 1.0, -1.0))


@pytest.mark.parametrize("tau, expected", [(-1.0, 0.0), (-0.5, 0.25), (-2.0, -2.0)])
def test_indicial_polynomial(newtonian, tau, expected):
    assert indicial(newtonian, tau) == pytest.approx(expected, abs=1e-15)


def test_indicial_is_vectorized(serrin):
    taus = np.array([-1.0, -0.5, 0.0])
    assert np.allclose(indicial(serrin, taus), [indicial(serrin, t) for t in taus])


@pytest.mark.parametrize("N, value", [(2, 2.0 * math.pi), (3, 4.0 * math.pi), (4, 2.0 * math.pi ** 2)])
def test_sphere_area(N, value):
    assert sphere_area(N) == pytest.approx(value, rel=1e-14)


def test_hardy_reduction_to_critical():
    params = OperatorParams(4, 2.0, 0.0)
    reduction = hardy_reduction(params)
    assert reduction.mu_tilde == pytest.approx(-1.0)
    assert reduction.exponent_shift == pytest.approx(-1.0)
    assert reduction.reduced.regime is Regime.CRITICAL
    reduced = exponent_data(reduction.reduced)
    assert reduced.tau_minus == pytest.approx(-1.0, abs=1e-12)
    assert reduced.tau_plus == pytest.approx(exponent_data(params).tau_plus - 1.0, abs=1e-12)


def test_hardy_reduction_identity_without_drift(serrin):
    reduction = hardy_reduction(serrin)
    assert reduction.mu_tilde == serrin.mu2
    assert reduction.exponent_shift == 0.0


def test_hardy_reduction_half_shift():
    reduction = hardy_reduction(OperatorParams(3, 1.0, 0.0))
    assert reduction.mu_tilde == pytest.approx(-0.25)
    assert reduction.exponent_shift == pytest.approx(-0.5)
    reduced = exponent_data(reduction.reduced)
    assert reduced.tau_minus == pytest.approx(-0.5, abs=1e-12)
    assert reduced.tau_plus == pytest.approx(-0.5, abs=1e-12)


def test_hardy_reduction_flags_sign_note(serrin):
    with discrepancies.collect() as notes:
        hardy_reduction(serrin)
    assert notes.codes == ["hardy-shift-sign"]
    assert notes.messages()[0].startswith("hardy-shift-sign: ")


def test_critical_exponents_at_hardy_constant(hardy_critical):
    crit = critical_exponents(hardy_critical, 0.0)
    assert crit.p_sharp == pytest.approx(5.0, rel=1e-12)
    assert crit.q_sharp == pytest.approx(5.0, rel=1e-12)
    assert crit.q_sharp_measure == crit.q_sharp


def test_critical_exponents_serrin(serrin):
    crit = critical_exponents(serrin, 0.0)
    assert crit.p_sharp == pytest.approx(8.2361, abs=1e-4)
    assert crit.q_sharp == pytest.approx(9.8541, abs=1e-4)


def test_critical_exponents_with_drift_report_both_thresholds():
    params = OperatorParams(4, 1.0, -0.2)
    crit = critical_exponents(params, 0.0)
    tau_plus = exponent_data(params).tau_plus
    assert crit.q_sharp - crit.q_sharp_measure == pytest.approx(1.0 / -tau_plus)


def test_p_sharp_tends_to_one(serrin):
    assert critical_exponents(serrin, -2.0 + 1e-9).p_sharp == pytest.approx(1.0, abs=1e-8)


def test_critical_exponents_domain(serrin, newtonian):
    with pytest.raises(DomainError):
        critical_exponents(serrin, -2.0)
    with pytest.raises(NoSerrinExponentError):
        critical_exponents(newtonian, 0.0)


def test_tau_plus_of_matches_scalar_path():
    mu2 = np.linspace(-0.25, 0.5, 7)
    values = tau_plus_of(3, 0.0, mu2)
    expected = [exponent_data(OperatorParams(3, 0.0, m)).tau_plus for m in mu2]
    assert np.allclose(values, expected, atol=1e-12)


def test_log_fundamental_note_for_pure_laplacian(newtonian):
    with discrepancies.collect() as notes:
        exponent_data(newtonian)
    assert "log-fundamental-remark" in notes.codes


admissible_triples = st.tuples(
    st.floats(2.0, 6.0),
    st.floats(-3.0, 3.0),
    st.floats(-2.0, 2.0),
)


@settings(max_examples=300, deadline=None)
@given(admissible_triples)
def test_exponent_calculus_properties(triple):
    N, mu1, mu2 = triple
    b = 2.0 - N + mu1
    assume(b * b + 4.0 * mu2 > 1e-3)
    params = OperatorParams(N, mu1, mu2)
    data = exponent_data(params)
    scale = max(1.0, abs(b), abs(mu2), data.tau_minus ** 2, data.tau_plus ** 2)

    assert abs(indicial(params, data.tau_minus)) <= 1e-10 * scale
    assert abs(indicial(params, data.tau_plus)) <= 1e-10 * scale
    assert data.tau_minus + data.tau_plus == pytest.approx(2.0 - N + mu1, abs=1e-10 * scale)
    assert data.tau_minus * data.tau_plus == pytest.approx(-mu2, abs=1e-10 * scale)

    reduced = exponent_data(hardy_reduction(params).reduced)
    assert reduced.tau_minus == pytest.approx(data.tau_minus - mu1 / 2.0, abs=1e-10 * scale)
    assert reduced.tau_plus == pytest.approx(data.tau_plus - mu1 / 2.0, abs=1e-10 * scale)


@settings(max_examples=200, deadline=None)
@given(admissible_triples, st.floats(0.01, 1.0))
def test_exponents_spread_as_mu2_grows(triple, step):
    N, mu1, mu2 = triple
    b = 2.0 - N + mu1
    assume(b * b + 4.0 * mu2 > 1e-3)
    low = exponent_data(OperatorParams(N, mu1, mu2))
    high = exponent_data(OperatorParams(N, mu1, mu2 + step))
    assert high.tau_plus > low.tau_plus
    assert high.tau_minus < low.tau_minus
