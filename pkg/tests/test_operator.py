import math

import numpy as np
import pytest

from CKNKit import discrepancies
from CKNKit.exceptions import DomainError, InadmissibleParametersError
from CKNKit.exponents import OperatorParams, exponent_data, hardy_reduction, indicial, indicial_derivative
from CKNKit.operator import (
    RadialProfile,
    adjoint_bound_check,
    apply_adjoint,
    apply_divergence_form,
    apply_power,
    apply_power_log,
    apply_power_log_squared,
    apply_radial,
    fd_step,
    fundamental_profiles,
    gamma,
    gaussian,
    phi,
    power,
    power_log,
    radial_adjoint,
    rational,
)
from CKNKit.quadrature import from_profile, radial_bump


def test_phi_and_gamma_newtonian(newtonian):
    assert phi(newtonian, 2.0) == pytest.approx(0.5)
    assert gamma(newtonian, 2.0) == pytest.approx(1.0)
    assert np.allclose(phi(newtonian, np.array([0.5, 4.0])), [2.0, 0.25])


def test_phi_critical_is_logarithmic(planar):
    assert phi(planar, math.exp(-1.0)) == pytest.approx(1.0)
    assert phi(planar, 1.0) == 0.0
    assert phi(planar, 2.0) < 0.0


def test_phi_rejects_nonpositive_radius(newtonian):
    with pytest.raises(DomainError):
        phi(newtonian, 0.0)
    with pytest.raises(DomainError):
        gamma(newtonian, np.array([1.0, -1.0]))


def test_phi_rejects_inadmissible():
    with pytest.raises(InadmissibleParametersError):
        phi(OperatorParams(3, 1.0, -1.0), 1.0)


def test_apply_power_vanishes_on_exponents(serrin):
    data = exponent_data(serrin)
    for tau in (data.tau_minus, data.tau_plus):
        action = apply_power(serrin, tau)
        assert action.coefficient == pytest.approx(0.0, abs=1e-14)
        assert action.exponent == tau - 2.0


@pytest.mark.parametrize("params, tau, expected", [
    ((2, 0.0, 0.0), 0.0, (0.0, 0.0, -2.0)),
    ((3, 0.0, 0.0), -1.0, (0.0, -1.0, -3.0)),
    ((3, 0.0, 0.0), 0.0, (0.0, 1.0, -2.0)),
])
def test_apply_power_log(params, tau, expected):
    action = apply_power_log(OperatorParams(*params), tau)
    assert tuple(action) == pytest.approx(expected, abs=1e-15)


def test_apply_power_log_flags_coefficient_note(newtonian):
    with discrepancies.collect() as notes:
        apply_power_log(newtonian, -1.0)
    assert notes.codes == ["power-log-coefficient"]


@pytest.mark.parametrize("tau", [-1.1, -0.5, 0.0, 0.8])
def test_indicial_derivative(serrin, tau):
    h = 1e-3
    slope = (indicial(serrin, tau + h) - indicial(serrin, tau - h)) / (2 * h)
    assert indicial_derivative(serrin, tau) == pytest.approx(slope, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("params,tau", [((3, 0.0, -0.2), -0.4), ((2, 0.0, 0.0), 0.0), ((4, 1.0, 0.3), 0.6)])
def test_apply_power_log_squared(params, tau):
    params = OperatorParams(*params)
    profile = RadialProfile(
        lambda r: r ** tau * np.log(r) ** 2,
        lambda r: r ** (tau - 1) * (tau * np.log(r) ** 2 + 2 * np.log(r)),
        lambda r: r ** (tau - 2) * (tau * (tau - 1) * np.log(r) ** 2 + 2 * (2 * tau - 1) * np.log(r) + 2),
    )
    c_log2, c_log, c_plain, exponent = apply_power_log_squared(params, tau)
    r = np.array([0.2, 0.7, 2.5])
    ln = np.log(r)
    expected = (c_log2 * ln ** 2 + c_log * ln + c_plain) * r ** exponent
    assert np.allclose(apply_radial(params, profile, r), expected, rtol=1e-12, atol=1e-13)


def test_rational_second_derivative_by_differences():
    u = rational()
    r = np.array([0.1, 0.6, 1.9])
    assert u.deriv2 is None
    assert np.allclose(u.d2(r), (6 * r ** 2 - 2) / (1 + r ** 2) ** 3, rtol=1e-7)
    assert np.allclose(u(r), 1 / (1 + r ** 2))


@pytest.mark.parametrize("tau", [-1.3, -0.4, 0.7, 2.0])
def test_apply_radial_matches_closed_forms(serrin, tau):
    r = np.array([0.3, 0.8, 1.7])
    expected_power = apply_power(serrin, tau).coefficient * r ** (tau - 2.0)
    assert np.allclose(apply_radial(serrin, power(tau), r), expected_power, rtol=1e-12, atol=1e-14)

    action = apply_power_log(serrin, tau)
    expected_log = (action.coeff_log * -np.log(r) + action.coeff_plain) * r ** action.exponent
    assert np.allclose(apply_radial(serrin, power_log(tau), r), expected_log, rtol=1e-11, atol=1e-13)


@pytest.mark.parametrize("params", [(3, 0.0, -0.2), (2, 0.0, 0.0), (3, 0.0, -0.25), (5, 1.5, 0.3)])
def test_fundamental_profiles_solve_homogeneous_equation(params):
    params = OperatorParams(*params)
    radii = np.geomspace(1e-3, 3.0, 25)
    for profile in fundamental_profiles(params):
        scale = (np.abs(profile.eval(radii)) + np.abs(profile.d1(radii)) * radii
                 + np.abs(profile.d2(radii)) * radii ** 2) / radii ** 2
        assert np.max(np.abs(apply_radial(params, profile, radii)) / scale) < 1e-12


def test_finite_differences_are_second_order(serrin):
    exact_profile = gaussian(1.0)
    exact = apply_radial(serrin, exact_profile, 0.5)
    fd = exact_profile.without_derivatives()
    coarse = abs(apply_radial(serrin, fd, 0.5, h=0.02) - exact)
    fine = abs(apply_radial(serrin, fd, 0.5, h=0.01) - exact)
    assert math.log2(coarse / fine) >= 1.9


@pytest.mark.parametrize("profile", [power(-0.7), power(2.5), power_log(-0.3), power_log(0.4), gaussian(1.0)],
                         ids=lambda u: u.name)
def test_finite_difference_order_on_closed_forms(serrin, profile):
    exact = apply_radial(serrin, profile, 0.5)
    fd = profile.without_derivatives()
    coarse = abs(apply_radial(serrin, fd, 0.5, h=0.02) - exact)
    fine = abs(apply_radial(serrin, fd, 0.5, h=0.01) - exact)
    assert math.log2(coarse / fine) >= 1.9


@pytest.mark.parametrize("params", [(4, 1.0, -0.1), (3, 0.5, 0.2), (5, -1.0, 0.3)])
def test_hardy_substitution(params):
    params = OperatorParams(*params)
    reduced = hardy_reduction(params).reduced
    s = params.mu1 / 2.0
    v = gaussian(1.0)
    u = RadialProfile(
        lambda r: r ** s * v.eval(r),
        lambda r: s * r ** (s - 1.0) * v.eval(r) + r ** s * v.d1(r),
        lambda r: s * (s - 1.0) * r ** (s - 2.0) * v.eval(r) + 2.0 * s * r ** (s - 1.0) * v.d1(r) + r ** s * v.d2(r),
    )
    radii = np.geomspace(0.05, 2.0, 20)
    lhs = apply_radial(params, u, radii)
    rhs = radii ** s * apply_radial(reduced, v, radii)
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-12 * np.max(np.abs(rhs)))


def test_finite_difference_stencil_must_stay_positive(serrin):
    with pytest.raises(DomainError):
        apply_radial(serrin, gaussian(1.0).without_derivatives(), 1e-6, h=2e-6)


def test_default_step_scales_with_radius(serrin):
    assert fd_step(1e-8) == pytest.approx(1e-12)
    u = power(1.5).without_derivatives()
    exact = apply_radial(serrin, power(1.5), 1e-6)
    assert apply_radial(serrin, u, 1e-6) == pytest.approx(exact, rel=1e-6)


def test_divergence_form_agrees_with_radial_form():
    N, a = 3.0, 0.2
    hardy = ((N - 2.0 - 2.0 * a) / 2.0) ** 2
    params = OperatorParams(N, 2.0 * a, -hardy)
    radii = np.array([0.2, 0.5, 1.0, 1.8])
    u = gaussian(1.0)
    assert np.allclose(apply_divergence_form(N, a, u, radii), apply_radial(params, u, radii), rtol=1e-6, atol=1e-8)


def test_adjoint_on_quadratic(serrin):
    xi = from_profile(power(2.0))
    drift = -2.0 * exponent_data(serrin).tau_plus
    value = apply_adjoint(serrin, xi, np.array([1.0, 0.0, 0.0]))
    assert value == pytest.approx(-6.0 + 2.0 * drift, rel=1e-12)
    assert value == pytest.approx(-4.894, abs=1e-3)
    assert radial_adjoint(serrin, power(2.0), 1.0) == pytest.approx(value, rel=1e-12)


def test_adjoint_rejects_origin(serrin):
    with pytest.raises(DomainError):
        apply_adjoint(serrin, radial_bump(1.0), np.zeros(3))


def test_adjoint_bound(serrin):
    xi = radial_bump(1.0)
    drift = abs(-2.0 * exponent_data(serrin).tau_plus + serrin.mu1)
    ratio = adjoint_bound_check(serrin, xi, np.geomspace(1e-3, 0.95, 60))
    assert 0.0 < ratio <= max(1.0, drift) + 1e-12


def test_adjoint_bound_accepts_points(serrin):
    rng = np.random.default_rng(7)
    points = rng.uniform(-0.6, 0.6, size=(40, 3))
    assert np.isfinite(adjoint_bound_check(serrin, radial_bump(1.0), points))
