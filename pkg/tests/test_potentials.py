import math

import numpy as np
import pytest

from core.errors import ConfigError, DegeneracyError, DomainError
from app.potentials import (
    Potential,
    apriori_bound,
    check_hypotheses,
    evaluate,
    from_config,
    gradient,
    hessian,
    load_potential,
    radial_to_series,
    value,
    well_data,
)


def test_piecewise_profile_is_continuous_at_the_bridge(separable_pot):
    for x in (0.5, -0.5):
        inside = value(separable_pot, [x * (1 - 1e-12), 0.0])
        outside = value(separable_pot, [x * (1 + 1e-12), 0.0])
        assert inside == pytest.approx(0.25, abs=1e-10)
        assert outside == pytest.approx(0.25, abs=1e-10)


def test_values_at_known_points(separable_pot, radial_pot):
    assert value(separable_pot, [1.0, 0.0]) == 0.0
    assert value(separable_pot, [0.0, 0.0]) == pytest.approx(0.625)
    assert value(separable_pot, [2.0, 0.5]) == pytest.approx(1.25)
    assert value(radial_pot, [0.6, 0.8]) == pytest.approx(1.0)


@pytest.mark.parametrize("point", [(0.3, 0.2), (-0.7, 0.4), (1.4, -0.3), (0.05, 0.9)])
def test_gradient_and_hessian_match_central_differences(separable_pot, quartic_radial_pot, point):
    h = 1e-6
    for pot in (separable_pot, quartic_radial_pot):
        p = np.array(point) * (0.5 if pot is quartic_radial_pot else 1.0)
        fd_grad = [(value(pot, p + h * e) - value(pot, p - h * e)) / (2 * h) for e in np.eye(2)]
        np.testing.assert_allclose(gradient(pot, p), fd_grad, atol=1e-7)
        fd_hess = np.column_stack([(gradient(pot, p + h * e) - gradient(pot, p - h * e)) / (2 * h)
                                   for e in np.eye(2)])
        np.testing.assert_allclose(hessian(pot, p), fd_hess, atol=1e-6)


def test_well_data_orders_eigenvalues_and_keeps_orientation():
    pot = Potential(kind="quadratic-one-well", wells=[(0.5, -1.0)], params={"hessian": [[8.0, 0.0], [0.0, 2.0]]})
    wd = well_data(pot)
    assert wd.lambda1_sq == pytest.approx(2.0)
    assert wd.lambda2_sq == pytest.approx(8.0)
    assert np.linalg.det(wd.basis) == pytest.approx(1.0)
    x = np.array([[1.5, 0.25]])
    np.testing.assert_allclose(wd.to_global(wd.to_local(x)), x, atol=1e-14)


def test_well_data_separable(separable_pot):
    for which in (0, 1):
        wd = well_data(separable_pot, which)
        assert wd.lambda1_sq == pytest.approx(1.0)
        assert wd.lambda2_sq == pytest.approx(1.0)
        assert wd.is_radial
        assert wd.rho == 0.5


def test_degenerate_well_is_rejected():
    pot = Potential(kind="radial-power", wells=[(0.0, 0.0)], params={"q_prime": 4.0})
    with pytest.raises(DegeneracyError):
        well_data(pot)


def test_radial_power_below_two_is_not_smooth_at_the_well():
    pot = Potential(kind="radial-power", wells=[(0.0, 0.0)], params={"q_prime": 1.5})
    with pytest.raises(DomainError):
        evaluate(pot, (0.0, 0.0))


def test_radial_analytic_outside_radius(quartic_radial_pot):
    with pytest.raises(DomainError):
        value(quartic_radial_pot, [1.5, 0.0])


def test_hypotheses_on_separable_example(separable_pot):
    report = check_hypotheses(separable_pot)
    for name in ("nonnegative", "well_curvature", "coercive", "axis_valley"):
        assert report.passed(name) is True
    assert report.constants["ball_radius"] == 0.5
    assert report.constants["c0_ball"] == pytest.approx(1.0, rel=1e-9)
    assert report.constants["c1_ball"] == pytest.approx(1.0, rel=1e-9)
    assert report.constants["lambda"] == pytest.approx(2.0)
    assert apriori_bound(separable_pot, report) >= 1.01


def test_axis_valley_fails_when_the_valley_bends():
    # the valley bends away from the p1-axis between the wells
    tilted = Potential(kind="general-callable", wells=[(-1.0, 0.0), (1.0, 0.0)],
                       value_fn=lambda P: (P[..., 0] ** 2 - 1.0) ** 2
                       + (P[..., 1] - 0.3 * (P[..., 0] ** 2 - 1.0)) ** 2)
    report = check_hypotheses(tilted)
    assert report.passed("axis_valley") is False


def test_from_config_rejects_bad_input():
    with pytest.raises(ConfigError):
        from_config({"kind": "separable-double-well", "colour": "blue"})
    with pytest.raises(ConfigError):
        from_config({"kind": "quadratic-one-well", "wells": [[0, 0]], "params": {"hessian": [[1, 2], [0, 1]]}})
    with pytest.raises(ConfigError):
        from_config({"kind": "general-callable", "wells": [[0, 0]]})
    with pytest.raises(ConfigError):
        load_potential("does/not/exist.json")


def test_from_config_defaults_separable_wells():
    pot = from_config({"kind": "separable-double-well", "params": {"profile": "quartic"}})
    assert pot.is_double_well
    assert value(pot, [0.0, 0.0]) == pytest.approx(0.25)


def test_load_potential(separable_json):
    pot = load_potential(separable_json)
    assert pot.kind == "separable-double-well"


def test_radial_to_series(quartic_radial_pot):
    assert radial_to_series(quartic_radial_pot) == {4: [0.5, 0.0, 1.0, 0.0, 0.5]}
    odd = Potential(kind="radial-analytic-one-well", wells=[(0.0, 0.0)], params={"coeffs": [0.3]})
    with pytest.raises(DomainError):
        radial_to_series(odd)


def test_radial_series_matches_the_potential(quartic_radial_pot):
    p = np.array([0.3, -0.2])
    r2 = float(p @ p)
    quartic = sum(c * p[0] ** (4 - i) * p[1] ** i for i, c in enumerate(radial_to_series(quartic_radial_pot)[4]))
    assert value(quartic_radial_pot, p) == pytest.approx(r2 + quartic)
    assert math.isclose(quartic, 0.5 * r2**2)
