import math

import numpy as np
import pytest

from app.curves import SampledCurve, concatenate, energy, momentum, segment
from app.potentials import Potential
from app.twowell import (
    ALState,
    AreaConstrainedMinimizer,
    MinimizerOptions,
    TwoWellProblem,
    TwoWellSolver,
    axis_heteroclinic,
    bubble_energy_bound,
    bubble_semicircle,
    build_starts,
    detect_bubbles,
    direction_field_error,
    energy_and_gradient,
    energy_hessian,
    epsilon_threshold,
    make_problem,
    minimize,
    momentum_gradient,
    momentum_hessian,
)

from tests.oracles import separable_axis_energy


def _wavy(n: int = 21) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    return np.column_stack([-0.8 + 1.6 * t, 0.3 * np.sin(np.pi * t) + 0.1 * np.sin(3 * np.pi * t)])


def test_energy_gradient_matches_finite_differences(separable_pot):
    pts = _wavy()
    E, grad = energy_and_gradient(separable_pot, pts)
    assert E == pytest.approx(energy(SampledCurve(points=pts), separable_pot), rel=1e-14)
    h = 1e-6
    fd = np.zeros_like(pts)
    for i in range(len(pts)):
        for k in range(2):
            up, down = pts.copy(), pts.copy()
            up[i, k] += h
            down[i, k] -= h
            fd[i, k] = (energy_and_gradient(separable_pot, up)[0] - energy_and_gradient(separable_pot, down)[0]) / (2 * h)
    np.testing.assert_allclose(grad, fd, atol=1e-7)


def test_momentum_gradient_is_exact():
    pts = _wavy()
    g = momentum_gradient(pts)
    h = 1e-3
    for i in range(1, len(pts) - 1):
        for k in range(2):
            up, down = pts.copy(), pts.copy()
            up[i, k] += h
            down[i, k] -= h
            fd = (momentum(SampledCurve(points=up)) - momentum(SampledCurve(points=down))) / (2 * h)
            assert g[i, k] == pytest.approx(fd, abs=1e-12)
    np.testing.assert_array_equal(g[[0, -1]], 0.0)


@pytest.mark.parametrize("eps", [0.01, -0.03])
@pytest.mark.parametrize("side", ["left", "right"])
def test_bubble_semicircle_area(eps, side):
    bubble = bubble_semicircle((-1.0, 0.0), eps, side=side)
    assert bubble.closed
    assert momentum(bubble) == pytest.approx(eps, rel=1e-12)
    np.testing.assert_allclose(bubble.start, (-1.0, 0.0), atol=1e-15)


def test_bubble_energy_bound_for_conical_wells(separable_pot):
    eps = 0.02
    bubble = bubble_semicircle((-1.0, 0.0), eps)
    # F = |p - p_w| inside the well ball, so the bound is attained up to the polygon error
    assert energy(bubble, separable_pot) == pytest.approx(bubble_energy_bound(1.0, eps), rel=1e-3)


def test_epsilon_threshold():
    assert epsilon_threshold(1.0, 1.0, 0.5) == pytest.approx(math.pi / (2.0 + math.pi) * 0.25)
    with pytest.raises(ValueError):
        epsilon_threshold(0.0, 1.0, 0.5)


def test_detect_bubbles():
    wells = [(-1.0, 0.0), (1.0, 0.0)]
    assert detect_bubbles(segment((-1.0, 0.0), (1.0, 0.0), 101), wells, 0.5) == 0
    detour = concatenate([segment((-3.0, 0.0), (-1.1, 0.0), 50), segment((-1.1, 0.0), (1.0, 0.0), 80)])
    assert detect_bubbles(detour, wells, 0.5) == 1
    with_loop = concatenate([bubble_semicircle((-1.0, 0.0), 0.02), segment((-1.0, 0.0), (1.0, 0.0), 101)])
    # the loop stays inside the well ball
    assert detect_bubbles(with_loop, wells, 0.5) == 0


def test_problem_needs_two_wells(radial_pot):
    with pytest.raises(ValueError):
        TwoWellProblem(pot=radial_pot, A0=0.0)


def test_build_starts(separable_pot):
    problem = make_problem(separable_pot, 0.02, n=101,
                           opts=MinimizerOptions(jitter_starts=2, seed=5), hypotheses=False)
    starts = build_starts(problem)
    labels = [label for label, _ in starts]
    assert labels == ["straight", "bubble", "composite", "jitter-0", "jitter-1"]
    for _, curve in starts:
        assert len(curve) == 101
        np.testing.assert_allclose(curve.start, (-1.0, 0.0), atol=1e-12)
        np.testing.assert_allclose(curve.end, (1.0, 0.0), atol=1e-12)
    again = build_starts(problem)
    np.testing.assert_array_equal(starts[-1][1].points, again[-1][1].points)
    assert [label for label, _ in build_starts(make_problem(separable_pot, 0.0, n=101, hypotheses=False))] == \
        ["straight", "composite"]


def test_single_start_keeps_the_axis_at_zero_area(separable_pot):
    axis = axis_heteroclinic(separable_pot, 101)
    state = AreaConstrainedMinimizer(separable_pot, 0.0).run(axis)
    np.testing.assert_allclose(state.points[:, 1], 0.0, atol=1e-12)
    assert energy(SampledCurve(points=state.points), separable_pot) == pytest.approx(separable_axis_energy(), rel=1e-3)


def test_small_area_minimizer(separable_pot):
    eps = 0.02
    problem = make_problem(separable_pot, eps, n=101)
    result = minimize(problem, threads=2)
    E_axis = separable_axis_energy()
    assert result.momentum == pytest.approx(eps, abs=1e-5)
    assert result.bubble_count == 0
    assert E_axis - 1e-3 <= result.energy <= E_axis + 1.5 * bubble_energy_bound(1.0, eps) + 1e-3
    assert len(result.starts) == 3
    assert result.converged
    assert result.kkt_residual <= 1e-6
    feasible = [o for o in result.starts if abs(o.momentum - eps) <= 1e-5]
    assert result.start_index == min(feasible, key=lambda o: (not o.converged, o.energy, o.index)).index
    assert 0.0 <= direction_field_error(result, separable_pot, 0.02, 0.2) <= math.pi
    assert result.multiplier > 0.0


def test_minimize_is_deterministic(separable_pot):
    problem = make_problem(separable_pot, 0.01, n=61, opts=MinimizerOptions(jitter_starts=1, seed=11, max_rounds=3))
    a = minimize(problem, threads=1)
    b = minimize(problem, threads=3)
    np.testing.assert_array_equal(a.curve.points, b.curve.points)
    assert a.start_index == b.start_index


def test_callable_double_well_runs():
    pot = Potential(kind="general-callable", wells=[(-1.0, 0.0), (1.0, 0.0)],
                    value_fn=lambda P: 0.25 * (P[..., 0] ** 2 - 1.0) ** 2 + 0.5 * P[..., 1] ** 2)
    problem = make_problem(pot, 0.0, n=41, opts=MinimizerOptions(max_rounds=2), hypotheses=False)
    result = minimize(problem, threads=1)
    assert result.energy > 0.0
    assert abs(result.momentum) <= 1e-5


def test_hessians_match_finite_differences(aniso_pot):
    t = np.linspace(0.2, 1.3, 15)
    pts = np.column_stack([np.cos(t), 0.8 * np.sin(t)]) * (1.0 + 0.1 * t)[:, None]
    H = energy_hessian(aniso_pot, pts).toarray()
    HP = momentum_hessian(len(pts)).toarray()
    np.testing.assert_allclose(H, H.T, atol=1e-12)
    h = 1e-6
    for j in range(2, 2 * len(pts) - 2):
        up, down = pts.ravel().copy(), pts.ravel().copy()
        up[j] += h
        down[j] -= h
        up, down = up.reshape(-1, 2), down.reshape(-1, 2)
        fd = (energy_and_gradient(aniso_pot, up)[1] - energy_and_gradient(aniso_pot, down)[1]).ravel() / (2 * h)
        np.testing.assert_allclose(H[:, j], fd, atol=1e-6)
        fd_p = (momentum_gradient(up) - momentum_gradient(down)).ravel() / (2 * h)
        np.testing.assert_allclose(HP[2:-2, j], fd_p[2:-2], atol=1e-9)


def _bubble_start(eps: float) -> SampledCurve:
    start = concatenate([bubble_semicircle((-1.0, 0.0), eps), segment((-1.0, 0.0), (1.0, 0.0), 101)])
    return SampledCurve(points=start.points)


def test_newton_polish_never_worsens_the_residual(separable_pot):
    eps = 0.02
    rough = AreaConstrainedMinimizer(separable_pot, eps, MinimizerOptions(max_rounds=1, inner_maxiter=50,
                                                                          polish=False)).run(_bubble_start(eps))
    minimizer = AreaConstrainedMinimizer(separable_pot, eps)
    pts, mu, kkt, steps = minimizer.polish(rough.points, rough.multiplier)
    assert kkt <= rough.kkt_residual
    assert kkt == pytest.approx(minimizer.kkt_residual(pts, mu), rel=1e-12)
    assert 0 <= steps <= minimizer.opts.newton_steps
    np.testing.assert_array_equal(pts[[0, -1]], rough.points[[0, -1]])


def test_bubble_start_converges_to_the_tolerance(separable_pot):
    eps = 0.02
    state = AreaConstrainedMinimizer(separable_pot, eps).run(_bubble_start(eps), "bubble")
    assert state.converged
    assert state.kkt_residual <= 1e-6
    assert momentum(SampledCurve(points=state.points)) == pytest.approx(eps, abs=1e-6)


def _state(points: np.ndarray, converged: bool = True) -> ALState:
    return ALState(points=points, multiplier=0.0, penalty=10.0, rounds=1, kkt_residual=0.0 if converged else 1.0,
                   converged=converged)


def test_reduce_skips_infeasible_low_energy_starts(separable_pot):
    eps = 0.02
    problem = make_problem(separable_pot, eps, n=101, hypotheses=False)
    axis = axis_heteroclinic(separable_pot, 101)
    looped = concatenate([bubble_semicircle((-1.0, 0.0), eps), axis])
    assert energy(axis, separable_pot) < energy(looped, separable_pot)
    starts = [("straight", axis), ("bubble", looped)]
    result = TwoWellSolver(problem)._reduce(starts, [_state(axis.points), _state(looped.points)])
    assert result.start_label == "bubble"
    assert result.momentum == pytest.approx(eps, rel=1e-9)
    assert result.converged

    shifted = make_problem(separable_pot, 0.5, n=101, hypotheses=False)
    result = TwoWellSolver(shifted)._reduce(starts, [_state(axis.points), _state(looped.points)])
    assert result.start_label == "bubble"
    assert not result.converged


def test_reduce_prefers_converged_feasible_starts(separable_pot):
    problem = make_problem(separable_pot, 0.0, n=101, hypotheses=False)
    axis = axis_heteroclinic(separable_pot, 101)
    bent = axis.points.copy()
    bent[1:-1, 1] = 0.05 * np.sin(np.pi * np.linspace(0.0, 1.0, 101)[1:-1]) ** 2
    bent[1:-1, 1] *= np.sign(np.linspace(-1.0, 1.0, 101)[1:-1])
    curve = SampledCurve(points=bent)
    assert momentum(curve) == pytest.approx(0.0, abs=1e-12)
    starts = [("straight", axis), ("bent", curve)]
    result = TwoWellSolver(problem)._reduce(starts, [_state(axis.points, converged=False), _state(bent)])
    assert result.start_label == "bent"
    assert result.converged
