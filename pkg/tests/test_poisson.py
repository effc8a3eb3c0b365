import math

import numpy as np
import pytest

from CKNKit.exceptions import AsymptoteError, DomainError, GateDisagreementError, NonexistenceError, ValidationError
from CKNKit.exponents import OperatorParams, exponent_data
from CKNKit.operator import apply_radial, power
from CKNKit.poisson import (
    GateStatus,
    SourceTerm,
    closed_form_particular,
    comparison_check,
    green_solve,
    hardy_round_trip,
    power_source_solution,
    singular_coefficient,
    solution_coefficient,
    solution_summary,
    solution_table,
    verify_solution,
    weighted_l1_gate,
)

RADII = np.geomspace(0.01, 0.5, 15)

# (params, theta, R): admissible, non-resonant, integrable sources
CLOSED_FORM_CASES = [
    ((3, 0.0, -0.2), 0.0, 1.0),
    ((5, 1.5, 0.3), -1.0, 1.0),
    ((4, 1.0, -0.1), 0.5, 2.0),
    ((2, 0.0, 0.0), 0.0, 0.8),
    ((3, 0.5, 0.3), -1.2, 1.0),
    ((3, 0.0, 0.0), 0.0, 1.0),
    ((3, 0.0, 0.0), -1.5, 1.0),
    ((3, 0.0, -0.25), -1.2, 1.0),
    ((3, 0.0, -0.25), 0.5, 0.5),
    ((4, 0.0, 0.0), 0.3, 1.0),
    ((4, 0.0, -0.5), -1.5, 1.0),
    ((4, 0.5, 0.2), 1.0, 1.5),
    ((2.5, 0.0, 0.1), -0.5, 1.0),
    ((3, -1.0, 0.5), 0.0, 1.0),
    ((5, 0.0, -1.0), -0.4, 1.0),
    ((6, 2.0, -0.5), 0.7, 1.0),
    ((3, 0.0, -0.2), -1.7, 1.0),
    ((4, 1.0, -0.1), -1.5, 1.0),
    ((2, 0.0, 0.5), 0.0, 2.0),
    ((2, 1.0, 0.0), 0.2, 1.0),
]


def torsion_profile(N):
    return power(2.0, -1.0 / (2.0 * N)) + power(0.0, 1.0 / (2.0 * N))


class TestGate:
    def test_divergent_below_threshold(self, hardy_critical):
        gate = weighted_l1_gate(hardy_critical, SourceTerm.power(-2.7), 1.0)
        assert gate.status is GateStatus.DIVERGENT
        assert gate.analytic_margin == pytest.approx(-0.2)
        assert gate.decided_by == "both"
        assert gate.value is None

    @pytest.mark.parametrize("offset", [-0.5, -2e-3, 2e-3, 0.5])
    def test_near_threshold_agreement(self, serrin, offset):
        data = exponent_data(serrin)
        threshold = -(data.tau_plus - serrin.mu1 + serrin.N)
        gate = weighted_l1_gate(serrin, SourceTerm.power(threshold + offset), 1.0)
        assert gate.integrable == (offset > 0)
        assert gate.decided_by == "both"
        assert gate.numeric_exponent == pytest.approx(offset, rel=1e-6)

    @pytest.mark.parametrize("params", [
        (3, 0.0, -0.2), (3, 0.0, 0.0), (3, 0.0, -0.25), (4, 1.0, -0.1), (5, 1.5, 0.3),
        (2, 0.0, 0.0), (2, 0.5, -0.05), (3, 0.5, 0.3), (4.5, -1.0, 0.8), (6, 2.0, -0.5),
    ])
    def test_decision_matches_analytic_sign_on_a_grid(self, params):
        params = OperatorParams(*params)
        data = exponent_data(params)
        threshold = -(data.tau_plus - params.mu1 + params.N)
        margins = np.linspace(-1.0, 1.0, 100)
        assert np.all(np.abs(margins) > 1e-3)
        for margin in margins:
            gate = weighted_l1_gate(params, SourceTerm.power(threshold + margin), 1.0)
            assert gate.integrable == (margin > 0), margin
            assert gate.decided_by == "both"

    def test_mass_of_constant_source(self, newtonian):
        gate = weighted_l1_gate(newtonian, SourceTerm.constant(), 1.0)
        assert gate.integrable
        assert gate.value == pytest.approx(1.0 / 3.0, rel=1e-9)

    def test_zero_source(self, serrin):
        gate = weighted_l1_gate(serrin, SourceTerm.zero(), 1.0)
        assert gate.integrable
        assert gate.decided_by == "zero-source"

    def test_wrong_theta_hint_is_detected(self, hardy_critical):
        lying = SourceTerm(power(-2.7), theta_hint=0.0)
        with pytest.raises(GateDisagreementError):
            weighted_l1_gate(hardy_critical, lying, 1.0)


class TestClosedForms:
    @pytest.mark.parametrize("params, theta_of, label", [
        ((3, 0.0, -0.2), lambda d: 0.0, None),
        ((3, 0.0, -0.2), lambda d: d.tau_minus - 2.0, "tau_minus"),
        ((3, 0.0, -0.2), lambda d: d.tau_plus - 2.0, "tau_plus"),
        ((3, 0.0, -0.25), lambda d: d.tau_zero - 2.0, "tau_zero"),
        ((2, 0.0, 0.0), lambda d: -2.0, "tau_zero"),
        ((4, 1.0, -0.1), lambda d: 0.5, None),
    ])
    def test_particular_solves_power_source(self, params, theta_of, label):
        params = OperatorParams(*params)
        theta = theta_of(exponent_data(params))
        profile, resonance = closed_form_particular(params, theta, amplitude=2.0)
        assert resonance == label
        r = np.array([0.2, 0.5, 0.9, 1.5])
        assert np.allclose(apply_radial(params, profile, r), 2.0 * r ** theta, rtol=1e-10)

    def test_power_source_solution_vanishes_on_boundary(self, serrin):
        u = power_source_solution(serrin, 0.3, 2.0)
        assert u(2.0) == pytest.approx(0.0, abs=1e-14)


class TestGreenSolve:
    def test_torsion(self, newtonian):
        solution = green_solve(newtonian, SourceTerm.constant(), 1.0)
        assert np.allclose(solution(RADII), (1.0 - RADII ** 2) / 6.0, rtol=1e-8)
        assert solution(1.0) == pytest.approx(0.0, abs=1e-12)
        assert solution.resonance is None

    def test_planar_torsion(self, planar):
        solution = green_solve(planar, SourceTerm.constant(), 1.0)
        assert np.allclose(solution(RADII), (1.0 - RADII ** 2) / 4.0, rtol=1e-8)

    def test_homogeneous_with_singular_coefficient(self, newtonian):
        solution = green_solve(newtonian, SourceTerm.zero(), 1.0, k=1.0)
        assert np.allclose(solution(RADII), 1.0 / RADII - 1.0, rtol=1e-12)

    @pytest.mark.parametrize("params, theta, R", CLOSED_FORM_CASES)
    def test_matches_closed_form(self, params, theta, R):
        params = OperatorParams(*params)
        solution = green_solve(params, SourceTerm.power(theta), R)
        radii = np.geomspace(R / 100.0, R / 2.0, 15)
        exact = power_source_solution(params, theta, R)(radii)
        assert np.allclose(solution(radii), exact, rtol=1e-7)

    def test_singular_coefficient_round_trip(self, newtonian):
        solution = green_solve(newtonian, SourceTerm.constant(), 1.0, k=2.5)
        estimate = solution_coefficient(solution)
        assert estimate.k == pytest.approx(2.5, abs=1e-4)

    def test_singular_coefficient_round_trip_critical(self, planar):
        solution = green_solve(planar, SourceTerm.constant(), 1.0, k=1.5)
        assert solution_coefficient(solution).k == pytest.approx(1.5, abs=1e-4)

    @pytest.mark.parametrize("params, theta, k", [
        ((4, 1.0, -0.1), 0.5, 0.7),
        ((3, 0.5, 0.3), 0.0, -1.2),
        ((5, 1.5, 0.3), -1.0, 0.4),
    ])
    def test_singular_coefficient_round_trip_with_drift(self, params, theta, k):
        solution = green_solve(OperatorParams(*params), SourceTerm.power(theta), 1.0, k=k)
        assert solution.asymptotics_hypothesis
        assert abs(solution_coefficient(solution).k - k) < 1e-4

    def test_linear_in_source_and_coefficient(self):
        params = OperatorParams(4, 1.0, -0.1)
        f1, f2 = SourceTerm.constant(), SourceTerm.power(0.5, 2.0)
        both = green_solve(params, f1 + f2, 1.0, k=0.3)
        first = green_solve(params, f1, 1.0, k=0.1)
        second = green_solve(params, f2, 1.0, k=0.2)
        assert np.allclose(both(RADII), first(RADII) + second(RADII), rtol=1e-8)
        tripled = green_solve(params, SourceTerm.constant(3.0), 1.0)
        assert np.allclose(tripled(RADII), 3.0 * green_solve(params, f1, 1.0)(RADII), rtol=1e-9)

    def test_inadmissible_is_a_finding(self):
        with pytest.raises(NonexistenceError) as excinfo:
            green_solve(OperatorParams(3, 1.0, -1.0), SourceTerm.constant())
        assert excinfo.value.reason == "inadmissible"

    def test_divergent_source_is_a_finding(self, hardy_critical):
        with pytest.raises(NonexistenceError) as excinfo:
            green_solve(hardy_critical, SourceTerm.power(-2.7))
        assert excinfo.value.reason == "divergent_source"

    def test_critical_regime_needs_unit_ball(self, planar):
        with pytest.raises(DomainError):
            green_solve(planar, SourceTerm.constant(), 2.0)

    def test_verify_solution(self, newtonian):
        f = SourceTerm.constant()
        assert verify_solution(newtonian, torsion_profile(3), f, 0.1, 0.9) < 1e-12
        solution = green_solve(newtonian, f, 1.0)
        assert verify_solution(newtonian, solution, f, 0.01, 0.5) < 1e-5
        with pytest.raises(DomainError):
            verify_solution(newtonian, solution, f, 0.5, 0.1)

    @pytest.mark.parametrize("params", [(4, 1.0, -0.1), (3, 0.5, 0.2), (5, 1.5, 0.3)])
    def test_residual_with_drift_and_potential(self, params):
        params = OperatorParams(*params)
        f = SourceTerm.constant()
        solution = green_solve(params, f, 1.0)
        assert verify_solution(params, solution, f, 0.01, 1.0) < 1e-5
        rows = solution_table(solution)
        assert max(abs(row['residual']) for row in rows) < 1e-5

    def test_second_derivative_matches_differences(self):
        params = OperatorParams(4, 1.0, -0.1)
        solution = green_solve(params, SourceTerm.power(0.5), 1.0, k=0.3)
        r, h = 0.2, 1e-4
        centered = (solution.derivative(r + h) - solution.derivative(r - h)) / (2.0 * h)
        assert solution.second_derivative(r) == pytest.approx(centered, rel=1e-5)

    def test_comparison(self, newtonian):
        f = SourceTerm.constant()
        lower = green_solve(newtonian, f, 1.0)
        upper = green_solve(newtonian, f, 1.0, k=1.0)
        assert comparison_check(newtonian, lower, upper, RADII).ordered
        report = comparison_check(newtonian, upper, lower, RADII)
        assert not report.ordered
        assert report.worst_radius == pytest.approx(RADII[0])
        assert report.max_violation > 0

    @pytest.mark.parametrize("params, mu_tilde", [((4, 1.0, -0.1), -0.85), ((3, 0.5, 0.2), 0.0125)])
    def test_hardy_round_trip(self, params, mu_tilde):
        result = hardy_round_trip(OperatorParams(*params), SourceTerm.constant(), 1.0)
        assert result['mu_tilde'] == pytest.approx(mu_tilde)
        assert result['max_relative_difference'] < 1e-8

    def test_table_and_summary(self, newtonian):
        solution = green_solve(newtonian, SourceTerm.constant(), 1.0)
        rows = solution_table(solution)
        assert rows
        assert set(rows[0]) == {'r', 'u', 'residual'}
        assert all(0.01 <= row['r'] < 1.0 for row in rows)
        summary = solution_summary(solution)
        assert summary['gate']['status'] == "Integrable"
        assert summary['asymptotics_hypothesis'] is True


class TestSingularCoefficient:
    def test_subcritical_extrapolation(self, newtonian):
        radii = 0.5 ** np.arange(10, 20, dtype=float)
        estimate = singular_coefficient(newtonian, radii, (3.0 + radii) / radii)
        assert estimate.k == pytest.approx(3.0, abs=1e-10)
        assert estimate.order == pytest.approx(1.0, rel=1e-6)

    def test_critical_fit(self, planar):
        radii = 0.5 ** np.arange(10, 20, dtype=float)
        values = 2.0 * -np.log(radii) + 1.0
        assert singular_coefficient(planar, radii, values).k == pytest.approx(2.0, abs=1e-10)

    def test_needs_four_samples(self, newtonian):
        with pytest.raises(ValidationError):
            singular_coefficient(newtonian, [0.1, 0.05, 0.025], [1.0, 2.0, 3.0])

    def test_non_contracting_sequence(self, newtonian):
        radii = 0.5 ** np.arange(10, 20, dtype=float)
        with pytest.raises(AsymptoteError):
            singular_coefficient(newtonian, radii, (3.0 + 1.0 / radii) / radii)
