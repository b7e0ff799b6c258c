import asyncio

import pytest

from app.pipeline import WavePipelineGraph
from app.wave import a_nu_sweep

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("eps", [0.0, 0.01, 0.05])
def test_wave_from_the_minimizer(separable_pot, eps):
    graph = WavePipelineGraph(separable_pot, threads=2)
    assert graph.n == 801
    summary = asyncio.run(graph.run(eps))["summary"]
    assert summary["converged"]
    assert summary["kkt_residual"] <= 1e-6
    assert summary["momentum"] == pytest.approx(eps, abs=1e-6)
    assert summary["bubble_count"] == 0
    assert summary["H_over_sqrt2E"] == pytest.approx(1.0, abs=1e-4)
    assert summary["relative_ode_residual"] <= 1e-3
    if eps == 0.0:
        assert abs(summary["nu"]) <= 1e-3
        assert abs(summary["zero_eigenvalue"]) <= 1e-4 * summary["lam"]
        assert summary["zero_correlation"] >= 0.99
        assert summary["next_eigenvalue"] > abs(summary["zero_eigenvalue"])
    else:
        assert abs(summary["nu"]) > 1e-3
        assert "zero_eigenvalue" not in summary


def test_small_area_sweep(separable_pot):
    graph = WavePipelineGraph(separable_pot, n=101, threads=2)
    rows = asyncio.run(graph.run_sweep([0.0, 0.05]))
    assert [row["A0"] for row in rows] == [0.0, 0.05]
    for row in rows:
        assert row["momentum"] == pytest.approx(row["A0"], abs=1e-5)
        assert row["bubble_count"] == 0
    assert rows[1]["energy"] >= rows[0]["energy"] - 1e-6
    assert rows[1]["nu_from_multiplier"] >= 0.0


def test_a_nu_sweep_table(separable_pot):
    table = a_nu_sweep(separable_pot, [0.02], n=101, threads=1)
    assert list(table["A0"]) == [0.02]
    assert {"nu", "nu_from_multiplier", "energy", "bubble_count"} <= set(table.columns)
