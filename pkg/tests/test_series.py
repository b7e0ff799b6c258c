import math

import numpy as np
import pytest

from core.errors import DomainError, NumericalSingularityError
from app.potentials import well_data
from app.series import (
    HomogPoly,
    L_matrix,
    apply_L,
    dot_gradients,
    for_potential,
    gbeta_coefficients,
    gbeta_radial,
    radial_series,
    radial_taylor_coefficients,
    residual_Wexp,
    solve_L,
)


def test_homogeneous_polynomial_algebra():
    p = HomogPoly(degree=2, coeffs=[1.0, -2.0, 3.0])
    x = np.array([[0.4, -1.3], [2.0, 0.5]])
    expected = x[:, 0] ** 2 - 2.0 * x[:, 0] * x[:, 1] + 3.0 * x[:, 1] ** 2
    np.testing.assert_allclose(p(x), expected)
    np.testing.assert_allclose(p.grad(x), np.column_stack([2 * x[:, 0] - 2 * x[:, 1], -2 * x[:, 0] + 6 * x[:, 1]]))
    np.testing.assert_allclose((p * p)(x), expected**2)
    np.testing.assert_allclose(HomogPoly.radial_power(2, 0.5).coeffs, [0.5, 0.0, 1.0, 0.0, 0.5])
    np.testing.assert_allclose(dot_gradients(p, p)(x), np.sum(p.grad(x) ** 2, axis=1))
    with pytest.raises(ValueError):
        HomogPoly(degree=3, coeffs=[1.0, 2.0])


@pytest.mark.parametrize("beta", [0.4, math.pi / 2, 2.5])
def test_L_matrix_agrees_with_apply_L(beta):
    rng = np.random.default_rng(3)
    P = HomogPoly(degree=5, coeffs=rng.normal(size=6))
    M = L_matrix(5, 1.0, 2.0, beta)
    np.testing.assert_allclose(M @ P.coeffs, apply_L(P, 1.0, 2.0, beta).coeffs, atol=1e-12)
    x = rng.normal(size=(4, 2))
    s, c = math.sin(beta), math.cos(beta)
    Lam_x = np.column_stack([-s * x[:, 0] - 2.0 * c * x[:, 1], c * x[:, 0] - 2.0 * s * x[:, 1]])
    np.testing.assert_allclose(apply_L(P, 1.0, 2.0, beta)(x), 2.0 * np.sum(Lam_x * P.grad(x), axis=1),
                               atol=1e-11)


def test_solve_L_inverts_L():
    Q = HomogPoly(degree=4, coeffs=[1.0, 0.0, -2.0, 0.5, 3.0])
    P = solve_L(Q, 1.0, 2.0, 1.1)
    np.testing.assert_allclose(apply_L(P, 1.0, 2.0, 1.1).coeffs, Q.coeffs, atol=1e-12)
    assert solve_L(HomogPoly.zero(6), 1.0, 1.0, 1.0).is_zero()
    with pytest.raises(ValueError):
        solve_L(HomogPoly.zero(2), 1.0, 1.0, 1.0)


def test_solve_L_singular_near_beta_zero():
    with pytest.raises(NumericalSingularityError):
        solve_L(HomogPoly.monomial((4, 0)), 1.0, 1.0, 1e-14)


def test_quadratic_potential_gives_zero_series(aniso_pot):
    series = for_potential(aniso_pot, 1.0, 8)
    assert series.max_degree == 8
    assert all(P.is_zero() for P in series.terms)
    with pytest.raises(ValueError):
        gbeta_coefficients({}, 1.0, 1.0, 1.0, 2)


def test_radial_quartic_degree_four_term(quartic_radial_pot):
    beta = 1.2
    series = for_potential(quartic_radial_pot, beta, 8)
    P4 = series.terms[1]
    expected = -0.5 / (8.0 * math.sin(beta))
    np.testing.assert_allclose(P4.coeffs, [expected, 0.0, 2.0 * expected, 0.0, expected], atol=1e-14)
    c = radial_taylor_coefficients([0.0, 0.5], beta, 8)
    assert c[4] == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("beta", [0.7, math.pi / 2, 2.2])
def test_series_matches_radial_closed_form(quartic_radial_pot, beta):
    series = for_potential(quartic_radial_pot, beta, 10)
    for P, R in zip(series.terms, radial_series([0.0, 0.5], beta, 10)):
        np.testing.assert_allclose(P.coeffs, R.coeffs, atol=1e-12)
    r = 0.05
    exact = gbeta_radial([0.0, 0.5], beta, r)
    assert float(series.value(np.array([[r, 0.0]]))[0]) == pytest.approx(exact, abs=1e-11)


def test_residual_and_validity_radius(quartic_radial_pot):
    series = for_potential(quartic_radial_pot, 1.0, 10)
    theta = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    ring = 0.1 * np.column_stack([np.cos(theta), np.sin(theta)])
    assert residual_Wexp(quartic_radial_pot, series, ring) <= 1e-9
    assert 0.0 < series.validity_radius <= well_data(quartic_radial_pot).rho
    assert set(series.to_table()) == {str(n) for n in range(3, 11)}


def test_series_at_another_beta(quartic_radial_pot):
    series = for_potential(quartic_radial_pot, 1.0, 6)
    moved = series.at_beta(2.0, quartic_radial_pot)
    assert moved.beta == 2.0
    np.testing.assert_allclose(moved.terms[1].coeffs, for_potential(quartic_radial_pot, 2.0, 6).terms[1].coeffs)


def test_radial_closed_form_negative_radicand():
    with pytest.raises(DomainError):
        gbeta_radial([0.0, -2.0], math.pi / 2, 1.0)
