from typing import Optional, Sequence

import numpy as np

from core.config import get_settings
from app.curves.functionals import euclidean_length
from app.curves.models import SampledCurve
from app.onewell import analytic_flow
from app.onewell.linear_flow import (
    approach_spectrum,
    constraint_offset,
    local_start,
    quadratic_flow,
    solve_beta,
)
from app.onewell.models import OneWellSolution
from app.potentials.models import Potential, WellData
from app.series.gbeta import GBetaSeries


def _solution(well: WellData, p0, beta: float, local: np.ndarray, ell: np.ndarray, C: float,
              A_tilde: float, **extra) -> OneWellSolution:
    curve = SampledCurve(points=well.to_global(local), param="degenerate-arclength", params=ell)
    return OneWellSolution(
        beta=beta,
        curve=curve,
        L_beta=float(ell[-1]),
        A=A_tilde + C,
        A_tilde=A_tilde,
        C=C,
        spectrum=approach_spectrum(well.lambda1, well.lambda2, beta),
        euclidean_length=euclidean_length(curve),
        well=well,
        p0=(float(p0[0]), float(p0[1])),
        **extra,
    )


def geodesic(well: WellData, p0: Sequence[float], n: Optional[int] = None) -> OneWellSolution:
    """Unconstrained minimizer z(t) = (p1 e^{-lambda1 t}, p2 e^{-lambda2 t}); its length is r~(p0)."""
    n = n or get_settings().nodes
    beta = np.pi / 2.0
    local, ell = quadratic_flow(well, p0, beta, n)
    C = constraint_offset(well, p0)
    return _solution(well, p0, beta, local, ell, C, 0.0)


def isoperimetric(well: WellData, p0: Sequence[float], A: float, n: Optional[int] = None,
                  gbeta: Optional[GBetaSeries] = None, pot: Optional[Potential] = None) -> OneWellSolution:
    """
    Minimizer from p0 into the well with P = A.

    Without `gbeta` the flow of Lambda_beta is exact. With a series, `gbeta` fixes the well and the W terms,
    beta is re-solved on the achieved constraint and the series is rebuilt at that beta; `pot` supplies
    the true W (the truncated series stands in for it otherwise).
    """
    n = n or get_settings().nodes
    if gbeta is not None:
        well = gbeta.well
    C = constraint_offset(well, p0)
    A_tilde = A - C
    if gbeta is None:
        beta = solve_beta(well, p0, A_tilde)
        local, ell = quadratic_flow(well, p0, beta, n)
        return _solution(well, p0, beta, local, ell, C, A_tilde)

    local_start(well, p0)
    beta = analytic_flow.solve_beta_analytic(gbeta, p0, A_tilde, pot)
    series = gbeta.at_beta(beta, pot)
    flow = analytic_flow.integrate(series, p0, n, pot)
    residual = analytic_flow.check_residual(pot, series, flow.local)
    g_start = float(series.value_local(flow.local[0]))
    return _solution(well, p0, beta, flow.local, flow.ell, C, flow.A_tilde, analytic=True,
                     residual_Wexp=residual, g_start=g_start)


def level_set_points(well: WellData, level: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random global points on the ellipse r~ = level."""
    theta = rng.uniform(0.0, 2.0 * np.pi, count)
    local = np.column_stack([np.sqrt(2.0 * level / well.lambda1) * np.cos(theta),
                             np.sqrt(2.0 * level / well.lambda2) * np.sin(theta)])
    return well.to_global(local)
