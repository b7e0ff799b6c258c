import math

import numpy as np
import pytest

from core.errors import EmptyCurveError, PreconditionError
from app.curves import energy, euclidean_length, momentum, segment, speed_defect
from app.onewell import (
    approach_spectrum,
    area_preserving_perturbation,
    attainable_sweep,
    beta_from_multiplier,
    calibration_certificate,
    closed_form_energy,
    constraint_offset,
    euclidean_length_bound,
    geodesic,
    isoperimetric,
    jensen_lower_bound,
    level_set_points,
    multiplier_from_beta,
    nonexistence_sequence,
    power_well,
    radial_spiral,
    reduced_radius,
    solve_beta,
    transform_constraint,
)
from app.potentials import Potential, WellData, well_data
from app.series import for_potential
from app.series.linear_op import lambda_matrix
from app.twowell import MinimizerOptions, constrained_minimize

from tests.oracles import quartic_radial_length, radial_isoperimetric_energy, spiral_angle


def test_radial_geodesic(radial_well, radial_pot):
    sol = geodesic(radial_well, (1.0, 0.0), 512)
    assert sol.beta == pytest.approx(math.pi / 2)
    assert sol.L_beta == pytest.approx(0.5, abs=1e-12)
    assert energy(sol.curve, radial_pot) == pytest.approx(0.5, abs=1e-12)
    assert speed_defect(sol.curve, radial_pot) <= 1e-7
    np.testing.assert_array_equal(sol.curve.end, [0.0, 0.0])


def test_anisotropic_geodesic(aniso_well, aniso_pot):
    sol = geodesic(aniso_well, (1.0, 1.0), 20000)
    assert sol.L_beta == pytest.approx(1.5, rel=1e-12)
    assert energy(sol.curve, aniso_pot) == pytest.approx(1.5, rel=1e-6)
    assert sol.C == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert not sol.spectrum.spiral


@pytest.mark.parametrize("A", [0.0, 0.1, 0.25, 0.5, 1.0])
def test_radial_isoperimetric_energy(radial_well, radial_pot, A):
    sol = isoperimetric(radial_well, (1.0, 0.0), A, 20000)
    closed = radial_isoperimetric_energy(A)
    assert sol.A_tilde == pytest.approx(A, abs=1e-15)
    assert sol.L_beta == pytest.approx(closed, rel=1e-12)
    assert energy(sol.curve, radial_pot) == pytest.approx(closed, rel=1e-6)
    assert speed_defect(sol.curve, radial_pot) <= 1e-6


def test_radial_minimizer_is_a_log_spiral(radial_well):
    A = 0.25
    sol = isoperimetric(radial_well, (1.0, 0.0), A, 20000)
    pts = sol.curve.points[:-1]
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
    keep = r >= 1e-3
    np.testing.assert_allclose(theta[keep], spiral_angle(r[keep], A), atol=1e-5)
    assert momentum(sol.curve) == pytest.approx(A, abs=1e-5)
    assert sol.spectrum.spiral


def test_radial_spiral_closed_form(radial_pot):
    curve = radial_spiral((1.0, 0.0), 0.25, 20000)
    assert curve.params[-1] == pytest.approx(radial_isoperimetric_energy(0.25), rel=1e-12)
    assert energy(curve, radial_pot) == pytest.approx(radial_isoperimetric_energy(0.25), rel=1e-4)
    with pytest.raises(EmptyCurveError):
        radial_spiral((0.0, 0.0), 0.1, 10)


def test_constraint_offset(aniso_well):
    assert constraint_offset(aniso_well, (1.0, 1.0)) == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert constraint_offset(WellData.diagonal(1.0, 1.0), (0.3, 0.0)) == 0.0


def test_transform_constraint_shifts_by_the_offset(radial_well, aniso_well):
    assert transform_constraint(radial_well, (1.0, 0.0), 0.3) == 0.3
    shifted = [transform_constraint(aniso_well, (1.0, 1.0), A) for A in (0.2, 0.45)]
    assert shifted[0] == pytest.approx(0.2 - 1.0 / 3.0, rel=1e-12)
    assert shifted[1] - shifted[0] == pytest.approx(0.25, rel=1e-12)


def test_solve_beta_and_multiplier_round_trip(aniso_well):
    for A_tilde in (-0.7, 0.0, 0.3):
        beta = solve_beta(aniso_well, (1.0, 1.0), A_tilde)
        assert 0.0 < beta < math.pi
        rt = 1.5
        assert rt / math.tan(beta) / 3.0 == pytest.approx(A_tilde, abs=1e-12)
        mu = multiplier_from_beta(beta, 1.0, 2.0)
        assert beta_from_multiplier(mu, 1.0, 2.0) == pytest.approx(beta, rel=1e-12)


def test_approach_spectrum_thresholds():
    radial = approach_spectrum(1.0, 1.0, math.pi / 2)
    assert not radial.spiral
    assert abs(radial.mu_plus + 1.0) <= 1e-12
    spiral = approach_spectrum(1.0, 1.0, 1.0)
    assert spiral.spiral
    assert spiral.mu_plus.imag != 0.0
    # lambda2 = 4 lambda1: threshold 0.8
    assert approach_spectrum(1.0, 4.0, math.asin(0.79)).spiral
    assert not approach_spectrum(1.0, 4.0, math.asin(0.81)).spiral


def test_approach_spectrum_matches_the_eigenvalues():
    rng = np.random.default_rng(11)
    for _ in range(100):
        l1, l2 = rng.uniform(0.2, 3.0, 2)
        beta = rng.uniform(0.05, math.pi - 0.05)
        spec = approach_spectrum(l1, l2, beta)
        eig = np.linalg.eigvals(lambda_matrix(l1, l2, beta))
        for mu in (spec.mu_plus, spec.mu_minus):
            assert np.min(np.abs(eig - mu)) <= 1e-10
        det = spec.mu_plus * spec.mu_minus
        trace = spec.mu_plus + spec.mu_minus
        assert det.real == pytest.approx(l1 * l2, rel=1e-12)
        assert det.real > 0.0
        assert trace.real == pytest.approx(-(l1 + l2) * math.sin(beta), rel=1e-12)
        assert trace.real < 0.0
        assert spec.spiral == (math.sin(beta) < 2.0 * math.sqrt(l1 * l2) / (l1 + l2))


@pytest.fixture
def rotated_pot() -> Potential:
    return Potential(kind="quadratic-one-well", wells=[(0.3, -0.2)], params={"hessian": [[3.0, 1.0], [1.0, 5.0]]})


def test_rotated_well_flows_hit_area_and_length(rotated_pot):
    well = well_data(rotated_pot)
    q = well.lambda1 + well.lambda2
    rng = np.random.default_rng(2024)
    for _ in range(6):
        angle, radius = rng.uniform(0.0, 2.0 * math.pi), rng.uniform(0.5, 1.0)
        p0 = np.asarray(well.center) + radius * np.array([math.cos(angle), math.sin(angle)])
        A = rng.uniform(-0.5, 0.5)
        sol = isoperimetric(well, p0, A, 2000)
        rt = float(reduced_radius(well, well.to_local(p0)))
        assert math.sin(sol.beta) * sol.L_beta == pytest.approx(rt, rel=1e-12)
        assert q * sol.A_tilde == pytest.approx(sol.L_beta * math.cos(sol.beta), rel=1e-10, abs=1e-12)
        assert momentum(sol.curve) == pytest.approx(A, abs=1e-5)
        assert energy(sol.curve, rotated_pot) == pytest.approx(sol.L_beta, rel=1e-6)
        assert speed_defect(sol.curve, rotated_pot) <= 1e-6


def test_level_set_points_are_equidistant_from_the_well(rotated_pot):
    well = well_data(rotated_pot)
    level = 0.4
    for x in level_set_points(well, level, 50, np.random.default_rng(5)):
        assert float(reduced_radius(well, well.to_local(x))) == pytest.approx(level, rel=1e-12)
        sol = geodesic(well, x, 400)
        assert sol.L_beta == pytest.approx(level, rel=1e-12)
        assert energy(sol.curve, rotated_pot) == pytest.approx(level, rel=1e-6)


def test_start_at_the_well(radial_well):
    with pytest.raises(EmptyCurveError):
        isoperimetric(radial_well, (0.0, 0.0), 0.1)


def test_calibration_certificates(radial_well, radial_pot):
    sol = isoperimetric(radial_well, (1.0, 0.0), 0.25, 20000)
    rng = np.random.default_rng(1234)
    lower = jensen_lower_bound(1.0, sol.A_tilde)
    for _ in range(100):
        cand = area_preserving_perturbation(sol.curve, rng, target=sol.A)
        report = calibration_certificate(sol, cand, radial_pot)
        assert report.omega_match
        assert report.verdict
        assert report.energy_candidate >= lower - 1e-6
        assert report.momentum_candidate == pytest.approx(sol.A, abs=1e-9)
    assert report.omega_solution == pytest.approx(sol.L_beta, rel=1e-5)


def test_certificate_needs_shared_endpoints(radial_well, radial_pot):
    sol = isoperimetric(radial_well, (1.0, 0.0), 0.0, 200)
    with pytest.raises(PreconditionError):
        calibration_certificate(sol, segment((0.5, 0.0), (0.0, 0.0), 10), radial_pot)


def test_euclidean_length_bound(radial_well, aniso_well):
    for well, p0, A in ((radial_well, (1.0, 0.0), 0.5), (aniso_well, (1.0, 1.0), 0.2)):
        sol = isoperimetric(well, p0, A, 4000)
        assert sol.euclidean_length == pytest.approx(euclidean_length(sol.curve))
        assert sol.euclidean_length <= euclidean_length_bound(well, p0, sol.beta)


def test_attainable_sweep_is_monotone(aniso_well):
    table = attainable_sweep(aniso_well, (1.0, 1.0), np.linspace(0.3, 2.8, 6), n=2000)
    assert list(table.columns) == ["beta", "A_tilde", "P", "A", "L_beta"]
    assert np.all(np.diff(table["A_tilde"].to_numpy()) < 0.0)
    np.testing.assert_allclose(table["P"], table["A"], atol=1e-5)


def test_nonexistence_sequence():
    q, A = 2.0, math.pi
    energies = []
    for j in (1, 4, 16):
        curve, E = nonexistence_sequence(q, A, j, 512)
        assert momentum(curve) == pytest.approx(A, abs=1e-9)
        assert E == pytest.approx(closed_form_energy(q, A, j), rel=1e-4)
        energies.append(E)
    assert energies[0] > energies[1] > energies[2] > 1.0 / 3.0
    assert closed_form_energy(q, A, 10**8) == pytest.approx(1.0 / 3.0, abs=1e-3)
    with pytest.raises(ValueError):
        nonexistence_sequence(1.0, A, 1)
    assert power_well(q).params["q_prime"] == 4.0


def test_constrained_oracle_does_not_beat_the_spiral(radial_well, radial_pot):
    A = 0.25
    opts = MinimizerOptions(max_rounds=10)
    curve, state = constrained_minimize(radial_pot, segment((1.0, 0.0), (0.0, 0.0), 400), A, opts)
    closed = radial_isoperimetric_energy(A)
    E = energy(curve, radial_pot)
    assert momentum(curve) == pytest.approx(A, abs=1e-5)
    assert E >= closed - 1e-4
    assert E <= closed * (1.0 + 1e-2)


@pytest.mark.slow
def test_analytic_radial_well(quartic_radial_pot):
    gbeta = for_potential(quartic_radial_pot, math.pi / 2, 10)
    sol = isoperimetric(well_data(quartic_radial_pot), (0.1, 0.0), 0.0, 2000, gbeta=gbeta, pot=quartic_radial_pot)
    assert sol.analytic
    assert sol.beta == pytest.approx(math.pi / 2, abs=1e-6)
    assert sol.L_beta == pytest.approx(quartic_radial_length(0.1), rel=1e-8)
    assert sol.residual_Wexp <= 1e-6
